use super::FiniteJointDistribution;
use crate::error::{Error, Result};
use crate::processes::MarkovArmSpec;

/// Largest number of product cells a block distribution may list.
const MAX_BLOCK_CELLS: usize = 1 << 22;

/// State law of a stationary finite Markov chain (pay-offs stripped), used
/// to build the finite joint distributions the dependence oracles consume.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainLaw {
    transition: Vec<Vec<f64>>,
    initial: Vec<f64>,
}

impl From<&MarkovArmSpec> for ChainLaw {
    fn from(spec: &MarkovArmSpec) -> Self {
        Self {
            transition: spec.transition().to_vec(),
            initial: spec.initial().to_vec(),
        }
    }
}

impl ChainLaw {
    pub fn two_state(epsilon: f64) -> Result<Self> {
        Ok(Self::from(&MarkovArmSpec::two_state(epsilon, [1.0, 0.0])?))
    }

    /// Joint chain of mutually independent chains. Joint state
    /// `(s_1, …, s_k)` is encoded in mixed radix with `s_1` most significant.
    pub fn product(laws: &[ChainLaw]) -> Result<Self> {
        let Some(first) = laws.first() else {
            return Err(Error::spec("product of zero chains"));
        };
        let mut acc = first.clone();
        for law in &laws[1..] {
            let (n1, n2) = (acc.num_states(), law.num_states());
            let n = n1 * n2;
            if n > 1 << 12 {
                return Err(Error::Capacity {
                    what: "product chain states",
                    required: n as u128,
                    limit: 1 << 12,
                });
            }
            let mut transition = vec![vec![0.0; n]; n];
            let mut initial = vec![0.0; n];
            for a in 0..n1 {
                for b in 0..n2 {
                    let s = a * n2 + b;
                    initial[s] = acc.initial[a] * law.initial[b];
                    for c in 0..n1 {
                        for d in 0..n2 {
                            transition[s][c * n2 + d] = acc.transition[a][c] * law.transition[b][d];
                        }
                    }
                }
            }
            acc = Self { transition, initial };
        }
        Ok(acc)
    }

    pub fn num_states(&self) -> usize {
        self.initial.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// `T^steps` by repeated multiplication.
    pub fn power(&self, steps: usize) -> Vec<Vec<f64>> {
        let n = self.num_states();
        let mut result: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
            .collect();
        for _ in 0..steps {
            result = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| (0..n).map(|m| result[i][m] * self.transition[m][j]).sum())
                        .collect()
                })
                .collect();
        }
        result
    }

    /// Joint law of `(X_1, X_{1+gap})`.
    pub fn pair_distribution(&self, gap: usize) -> Result<FiniteJointDistribution> {
        self.block_distribution(1, gap, 1)
    }

    /// Joint law of the past block `X_{1..past}` and the future block
    /// `X_{past+gap .. past+gap+future−1}`. Block atoms are state sequences
    /// in lexicographic order (first coordinate most significant).
    pub fn block_distribution(&self, past: usize, gap: usize, future: usize) -> Result<FiniteJointDistribution> {
        if past == 0 || future == 0 || gap == 0 {
            return Err(Error::spec("block lengths and gap must be at least 1"));
        }
        let n = self.num_states();
        let left = checked_pow(n, past)?;
        let right = checked_pow(n, future)?;
        if left.saturating_mul(right) > MAX_BLOCK_CELLS {
            return Err(Error::Capacity {
                what: "block distribution cells",
                required: left as u128 * right as u128,
                limit: MAX_BLOCK_CELLS as u128,
            });
        }
        let bridge = self.power(gap);
        let seq_prob = |code: usize, len: usize, start: Option<usize>| -> (f64, usize, usize) {
            let states = decode(code, n, len);
            let first = states[0];
            let mut p = match start {
                None => self.initial[first],
                Some(prev) => bridge[prev][first],
            };
            for w in states.windows(2) {
                p *= self.transition[w[0]][w[1]];
            }
            (p, first, *states.last().unwrap())
        };
        let mut probs = Vec::with_capacity(left * right);
        for l in 0..left {
            let (pl, _, last) = seq_prob(l, past, None);
            for r in 0..right {
                let (pr, _, _) = seq_prob(r, future, Some(last));
                probs.push(pl * pr);
            }
        }
        renormalize(&mut probs);
        FiniteJointDistribution::new(left, right, probs)
    }
}

fn checked_pow(base: usize, exp: usize) -> Result<usize> {
    base.checked_pow(exp as u32).ok_or(Error::Capacity {
        what: "block atoms",
        required: u128::MAX,
        limit: MAX_BLOCK_CELLS as u128,
    })
}

fn decode(mut code: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % base;
        code /= base;
    }
    out
}

// products of many factors can drift a few ulps from total mass 1
fn renormalize(probs: &mut [f64]) {
    let total: f64 = probs.iter().sum();
    if total > 0.0 && (total - 1.0).abs() < 1e-9 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
}
