//! Exact optimal n-round value over all history-dependent policies, for
//! micro instances.
//!
//! A deterministic policy maps each observed pay-off history to an arm.
//! With an observation alphabet of size `m` (distinct pay-off values of the
//! arm with the richest support), the histories before round `t` are the
//! `m^{t−1}` observation strings, so a policy is an assignment of one of `k`
//! arms to each of `Σ_{t<n} m^t` decision nodes. Each policy's value is the
//! exact expectation over all joint state trajectories. Randomised policies
//! cannot do better, since the value is linear in the mixing weights.

use crate::error::{Error, Result};
use crate::processes::MarkovArmSpec;

/// Default cap on the number of deterministic policies enumerated.
pub const VSTAR_DEFAULT_GUARD: u128 = 1 << 20;
const MAX_HORIZON: usize = 4;
const MAX_TRAJECTORIES: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct VstarResult {
    pub value: f64,
    pub policies: u128,
    pub trajectories: usize,
    /// Arm chosen at each decision node by a maximising policy, nodes ordered
    /// by round then by observation string.
    pub best_policy: Vec<usize>,
}

/// One joint trajectory: probability and, per round, each arm's pay-off and
/// observation symbol.
struct Trajectory {
    prob: f64,
    payoff: Vec<Vec<f64>>,
    obs: Vec<Vec<usize>>,
}

struct Tree {
    arms: usize,
    alphabet: usize,
    horizon: usize,
    offsets: Vec<usize>,
    trajectories: Vec<Trajectory>,
}

impl Tree {
    fn build(specs: &[MarkovArmSpec], n: usize) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::spec("at least one arm is required"));
        }
        if n == 0 || n > MAX_HORIZON {
            return Err(Error::config(format!(
                "exhaustive v* supports horizons 1..={MAX_HORIZON}, got {n}"
            )));
        }
        let symbols: Vec<Vec<f64>> = specs
            .iter()
            .map(|s| {
                let mut distinct: Vec<f64> = Vec::new();
                for &v in s.payoff() {
                    if !distinct.contains(&v) {
                        distinct.push(v);
                    }
                }
                distinct
            })
            .collect();
        let alphabet = symbols.iter().map(Vec::len).max().unwrap_or(1);
        let mut offsets = vec![0usize];
        for t in 0..n {
            offsets.push(offsets[t] + alphabet.pow(t as u32));
        }

        // per-arm state paths with probabilities
        let mut per_arm: Vec<Vec<(f64, Vec<usize>)>> = Vec::new();
        let mut total = 1usize;
        for spec in specs {
            let s = spec.num_states();
            let count = s.checked_pow(n as u32).unwrap_or(usize::MAX);
            total = total.saturating_mul(count);
            if total > MAX_TRAJECTORIES {
                return Err(Error::Capacity {
                    what: "v* joint trajectories",
                    required: total as u128,
                    limit: MAX_TRAJECTORIES as u128,
                });
            }
            let mut paths = Vec::new();
            for code in 0..count {
                let mut states = vec![0; n];
                let mut c = code;
                for slot in states.iter_mut().rev() {
                    *slot = c % s;
                    c /= s;
                }
                let mut p = spec.initial()[states[0]];
                for w in states.windows(2) {
                    p *= spec.transition()[w[0]][w[1]];
                }
                if p > 0.0 {
                    paths.push((p, states));
                }
            }
            per_arm.push(paths);
        }

        let mut trajectories = Vec::new();
        let mut choice = vec![0usize; specs.len()];
        'outer: loop {
            if per_arm.iter().all(|p| !p.is_empty()) {
                let mut prob = 1.0;
                let mut payoff = vec![vec![0.0; specs.len()]; n];
                let mut obs = vec![vec![0usize; specs.len()]; n];
                for (arm, spec) in specs.iter().enumerate() {
                    let (p, states) = &per_arm[arm][choice[arm]];
                    prob *= p;
                    for t in 0..n {
                        let v = spec.payoff()[states[t]];
                        payoff[t][arm] = v;
                        obs[t][arm] = symbols[arm].iter().position(|&x| x == v).expect("symbol listed");
                    }
                }
                trajectories.push(Trajectory { prob, payoff, obs });
            } else {
                break;
            }
            for arm in (0..specs.len()).rev() {
                choice[arm] += 1;
                if choice[arm] < per_arm[arm].len() {
                    continue 'outer;
                }
                choice[arm] = 0;
            }
            break;
        }

        Ok(Self {
            arms: specs.len(),
            alphabet,
            horizon: n,
            offsets,
            trajectories,
        })
    }

    fn nodes(&self) -> usize {
        self.offsets[self.horizon]
    }

    fn value(&self, policy: &[usize]) -> f64 {
        self.trajectories
            .iter()
            .map(|tr| {
                let mut code = 0;
                let mut total = 0.0;
                for t in 0..self.horizon {
                    let arm = policy[self.offsets[t] + code];
                    total += tr.payoff[t][arm];
                    code = code * self.alphabet + tr.obs[t][arm];
                }
                tr.prob * total
            })
            .sum()
    }
}

/// Maximises the exact expected `n`-round pay-off over every deterministic
/// history-dependent policy. `n ≤ 4`; the policy count `k^{nodes}` must not
/// exceed `guard`.
pub fn brute_force_vstar(specs: &[MarkovArmSpec], n: usize, guard: u128) -> Result<VstarResult> {
    let tree = Tree::build(specs, n)?;
    let nodes = tree.nodes();
    let policies = (tree.arms as u128).checked_pow(nodes as u32).unwrap_or(u128::MAX);
    if policies > guard {
        return Err(Error::Capacity {
            what: "v* deterministic policies",
            required: policies,
            limit: guard,
        });
    }
    let mut policy = vec![0usize; nodes];
    let mut best = (f64::NEG_INFINITY, policy.clone());
    loop {
        let v = tree.value(&policy);
        if v > best.0 + 1e-15 {
            best = (v, policy.clone());
        }
        // odometer increment in base k
        let mut i = 0;
        loop {
            if i == nodes {
                return Ok(VstarResult {
                    value: best.0,
                    policies,
                    trajectories: tree.trajectories.len(),
                    best_policy: best.1,
                });
            }
            policy[i] += 1;
            if policy[i] < tree.arms {
                break;
            }
            policy[i] = 0;
            i += 1;
        }
    }
}

/// Backward induction over observation histories; an independent route to
/// the same optimum, without enumerating policies.
pub fn vstar_dynamic_programming(specs: &[MarkovArmSpec], n: usize) -> Result<f64> {
    let tree = Tree::build(specs, n)?;
    let all: Vec<usize> = (0..tree.trajectories.len()).collect();
    Ok(best_continuation(&tree, 0, &all))
}

/// Largest achievable `Σ P(traj)·(remaining pay-off)` over trajectories
/// consistent with the current history.
fn best_continuation(tree: &Tree, t: usize, consistent: &[usize]) -> f64 {
    if t == tree.horizon || consistent.is_empty() {
        return 0.0;
    }
    (0..tree.arms)
        .map(|arm| {
            let now: f64 = consistent
                .iter()
                .map(|&i| tree.trajectories[i].prob * tree.trajectories[i].payoff[t][arm])
                .sum();
            let later: f64 = (0..tree.alphabet)
                .map(|o| {
                    let branch: Vec<usize> = consistent
                        .iter()
                        .copied()
                        .filter(|&i| tree.trajectories[i].obs[t][arm] == o)
                        .collect();
                    best_continuation(tree, t + 1, &branch)
                })
                .sum();
            now + later
        })
        .fold(f64::NEG_INFINITY, f64::max)
}
