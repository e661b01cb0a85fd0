//! Monte Carlo evaluation of a policy on freshly sampled environments.
//!
//! Run `r` samples its environment from `derive_seed(seed, [r, 0])`, plays
//! the policy on it, and reduces to a few per-run numbers. Runs are mapped
//! in chunks (in parallel when enabled) and folded sequentially in run
//! order, so a report depends only on the experiment, run count and seed.

use serde::{Deserialize, Serialize};

use super::bounds::{phi_total, prop4_bound, prop5_bound, theorem2_bound};
use super::{hindsight_gap, shortfall, Estimate, Moments};
use crate::error::{Error, Result};
use crate::exec::{try_map_indexed, Execution};
use crate::mixing::MixingProfile;
use crate::policies::{
    baseline_best_arm, baseline_classic_ucb, baseline_hindsight, example1_trace, run_example1_policy, run_gp_switching,
    run_phi_ucb, run_sticky_sampler, Example1Params, GpPolicyParams, PlayTrace,
};
use crate::processes::{sample_markov_paths, GaussianEnvSpec, GaussianSampler, MarkovArmSpec, PayoffMatrix};
use crate::rng::derive_seed;

const RUN_CHUNK: usize = 256;
const PATH_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub enum Environment {
    /// Independent stationary chains (deterministic arms are one-state chains).
    Markov(Vec<MarkovArmSpec>),
    Gaussian(GaussianEnvSpec),
}

impl Environment {
    pub fn arms(&self) -> usize {
        match self {
            Environment::Markov(specs) => specs.len(),
            Environment::Gaussian(spec) => spec.arms(),
        }
    }

    /// Stationary means.
    pub fn means(&self) -> Vec<f64> {
        match self {
            Environment::Markov(specs) => specs.iter().map(MarkovArmSpec::stationary_mean).collect(),
            Environment::Gaussian(spec) => spec.means().to_vec(),
        }
    }

    pub fn mu_star(&self) -> f64 {
        self.means().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `μ* − μ_i` for every arm.
    pub fn gaps(&self) -> Vec<f64> {
        let mu_star = self.mu_star();
        self.means().into_iter().map(|m| mu_star - m).collect()
    }

    fn kind(&self) -> &'static str {
        match self {
            Environment::Markov(_) => "markov",
            Environment::Gaussian(_) => "gaussian",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicyKind {
    PhiUcb(MixingProfile),
    GpSwitch(GpPolicyParams),
    BestArm,
    ClassicUcb,
    Example1(Example1Params),
    Hindsight,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::PhiUcb(_) => "phi-ucb",
            PolicyKind::GpSwitch(_) => "gp-switch",
            PolicyKind::BestArm => "best-arm",
            PolicyKind::ClassicUcb => "classic-ucb",
            PolicyKind::Example1(_) => "example1",
            PolicyKind::Hindsight => "hindsight-oracle",
        }
    }

    fn play(&self, env: &PayoffMatrix, means: &[f64], n: usize) -> Result<PlayTrace> {
        match self {
            PolicyKind::PhiUcb(profile) => run_phi_ucb(env, profile, n),
            PolicyKind::GpSwitch(params) => Ok(run_gp_switching(env, params, n)?.trace),
            PolicyKind::BestArm => baseline_best_arm(env, means, n),
            PolicyKind::ClassicUcb => baseline_classic_ucb(env, n),
            PolicyKind::Example1(params) => example1_trace(env, params, n),
            PolicyKind::Hindsight => baseline_hindsight(env, n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Theorem2,
    Prop4,
    Prop5,
}

impl BoundKind {
    pub fn name(self) -> &'static str {
        match self {
            BoundKind::Theorem2 => "theorem2",
            BoundKind::Prop4 => "prop4",
            BoundKind::Prop5 => "prop5",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundValue {
    pub name: &'static str,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experiment {
    pub name: String,
    pub environment: Environment,
    pub policy: PolicyKind,
    pub horizon: usize,
    pub bounds: Vec<BoundKind>,
}

impl Experiment {
    /// Checks the policy/environment pairing and the requested bounds.
    pub fn validate(&self) -> Result<()> {
        let k = self.environment.arms();
        if k == 0 {
            return Err(Error::config("environment has no arms"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        let mismatch = |need: &str| {
            Error::config(format!(
                "policy `{}` requires {need}, but the environment is `{}`",
                self.policy.name(),
                self.environment.kind()
            ))
        };
        match &self.policy {
            PolicyKind::GpSwitch(params) => {
                if !matches!(self.environment, Environment::Gaussian(_)) {
                    return Err(mismatch("a gaussian environment"));
                }
                if params.k != k {
                    return Err(Error::config(format!(
                        "gp-switch was set up for {} arms, environment has {k}",
                        params.k
                    )));
                }
                if self.horizon < params.m_star {
                    return Err(Error::config(format!(
                        "horizon {} is shorter than the cycle length {}",
                        self.horizon, params.m_star
                    )));
                }
            }
            PolicyKind::Example1(_) => {
                if k != 2 {
                    return Err(mismatch("exactly two arms"));
                }
            }
            PolicyKind::PhiUcb(_) | PolicyKind::ClassicUcb if self.horizon < k => {
                return Err(Error::config(format!(
                    "horizon {} is shorter than the {k} initial pulls",
                    self.horizon
                )));
            }
            _ => {}
        }
        for bound in &self.bounds {
            let ok = match bound {
                BoundKind::Theorem2 | BoundKind::Prop4 => matches!(self.policy, PolicyKind::PhiUcb(_)),
                BoundKind::Prop5 => matches!(self.policy, PolicyKind::GpSwitch(_)),
            };
            if !ok {
                return Err(Error::config(format!(
                    "bound `{}` does not apply to policy `{}`",
                    bound.name(),
                    self.policy.name()
                )));
            }
        }
        Ok(())
    }

    fn bound_values(&self, mean_counts: &[f64]) -> Result<Vec<BoundValue>> {
        let n = self.horizon;
        let gaps = self.environment.gaps();
        self.bounds
            .iter()
            .map(|&bound| {
                let value = match (&self.policy, bound) {
                    (PolicyKind::PhiUcb(p), BoundKind::Theorem2) => theorem2_bound(n as f64, &gaps, p.sum_bound())?,
                    (PolicyKind::PhiUcb(p), BoundKind::Prop4) => prop4_bound(&gaps, mean_counts, phi_total(p, n), n)?,
                    (PolicyKind::GpSwitch(g), BoundKind::Prop5) => {
                        prop5_bound(n, g.m_star, g.k, g.delta, g.c, g.alpha)?
                    }
                    _ => unreachable!("pairing checked by validate"),
                };
                Ok(BoundValue {
                    name: bound.name(),
                    value,
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegretReport {
    pub scenario: String,
    pub policy: &'static str,
    pub horizon: usize,
    pub runs: usize,
    pub seed: u64,
    pub mu_star: f64,
    /// `R̄(n)` across runs.
    pub regret_bar: Estimate,
    /// `R⁺(n)` across runs.
    pub regret_plus: Estimate,
    /// Mean `T_j(n)` per arm.
    pub mean_counts: Vec<f64>,
    /// Mean cumulative pseudo-regret after each round `t = 1..=n`.
    pub regret_curve: Vec<f64>,
    /// Full traces of the first runs, in run order.
    pub traces: Vec<PlayTrace>,
    pub bounds: Vec<BoundValue>,
}

impl RegretReport {
    pub fn bound(&self, name: &str) -> Option<f64> {
        self.bounds.iter().find(|b| b.name == name).map(|b| b.value)
    }
}

struct RunOutcome {
    trace: PlayTrace,
    plus: f64,
}

/// Runs `runs ≥ 2` independent (environment, policy) pairs and aggregates
/// them. The first `retain_traces` traces are kept in the report.
pub fn monte_carlo(
    experiment: &Experiment,
    runs: usize,
    seed: u64,
    exec: Execution,
    retain_traces: usize,
) -> Result<RegretReport> {
    experiment.validate()?;
    if runs < 2 {
        return Err(Error::config(format!(
            "at least 2 runs are needed for a standard error, got {runs}"
        )));
    }
    let n = experiment.horizon;
    let k = experiment.environment.arms();
    let means = experiment.environment.means();
    let mu_star = experiment.environment.mu_star();
    let sampler = match &experiment.environment {
        Environment::Gaussian(spec) => Some(GaussianSampler::new(spec.cov(), n)?),
        Environment::Markov(_) => None,
    };

    let one_run = |run: usize| -> Result<RunOutcome> {
        let env_seed = derive_seed(seed, &[run as u64, 0]);
        let matrix = match (&experiment.environment, &sampler) {
            (Environment::Markov(specs), _) => sample_markov_paths(specs, n, env_seed)?,
            (Environment::Gaussian(spec), Some(s)) => s.sample_env(spec, env_seed)?,
            (Environment::Gaussian(_), None) => unreachable!("sampler built above"),
        };
        let trace = experiment.policy.play(&matrix, &means, n)?;
        if trace.len() != n {
            return Err(Error::Shape(format!(
                "policy produced {} rounds, expected {n}",
                trace.len()
            )));
        }
        let plus = hindsight_gap(&trace, &matrix);
        Ok(RunOutcome { trace, plus })
    };

    let mut bar = Moments::default();
    let mut plus = Moments::default();
    let mut count_sums = vec![0.0; k];
    let mut payoff_sums = vec![0.0; n];
    let mut traces = Vec::new();
    for start in (0..runs).step_by(RUN_CHUNK) {
        let len = RUN_CHUNK.min(runs - start);
        let outcomes = try_map_indexed(len, exec, |i| one_run(start + i).map_err(|e| e.in_run(start + i)))?;
        for out in outcomes {
            bar.push(shortfall(&out.trace, mu_star));
            plus.push(out.plus);
            for (sum, c) in count_sums.iter_mut().zip(out.trace.counts(k)) {
                *sum += c as f64;
            }
            for (sum, x) in payoff_sums.iter_mut().zip(&out.trace.payoffs) {
                *sum += x;
            }
            if traces.len() < retain_traces {
                traces.push(out.trace);
            }
        }
    }

    let r = runs as f64;
    let mean_counts: Vec<f64> = count_sums.iter().map(|c| c / r).collect();
    let mut cum = 0.0;
    let regret_curve = payoff_sums
        .iter()
        .enumerate()
        .map(|(t, s)| {
            cum += s / r;
            (t + 1) as f64 * mu_star - cum
        })
        .collect();
    Ok(RegretReport {
        scenario: experiment.name.clone(),
        policy: experiment.policy.name(),
        horizon: n,
        runs,
        seed,
        mu_star,
        regret_bar: bar.estimate()?,
        regret_plus: plus.estimate()?,
        bounds: experiment.bound_values(&mean_counts)?,
        mean_counts,
        regret_curve,
        traces,
    })
}

/// Least-squares slope of `curve[t−1]` against `ln t` over `t ∈ [from, to]`
/// (1-based, inclusive).
pub fn log_slope(curve: &[f64], from: usize, to: usize) -> Result<f64> {
    if from == 0 || to <= from || to > curve.len() {
        return Err(Error::config(format!(
            "slope window [{from}, {to}] is not inside 1..={}",
            curve.len()
        )));
    }
    let pts: Vec<(f64, f64)> = (from..=to).map(|t| ((t as f64).ln(), curve[t - 1])).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    Ok(sxy / sxx)
}

fn chunked_moments<F>(paths: usize, exec: Execution, per_path: F) -> Result<Moments>
where
    F: Fn(usize) -> Result<Option<f64>> + Sync + Send,
{
    let chunks = paths.div_ceil(PATH_CHUNK);
    let parts = try_map_indexed(chunks, exec, |c| {
        let mut m = Moments::default();
        for path in c * PATH_CHUNK..((c + 1) * PATH_CHUNK).min(paths) {
            if let Some(x) = per_path(path)? {
                m.push(x);
            }
        }
        Ok(m)
    })?;
    let mut total = Moments::default();
    parts.iter().for_each(|m| total.merge(m));
    Ok(total)
}

/// Estimates `E(X_{τ_m} | X_{τ_1} = 1)` for the adversarial sampler, where
/// `m = sample_index` counts samples from 1. Only paths whose first sample
/// is 1 contribute; the estimate's `count` is that number.
pub fn example1_conditional_mean(
    chain: &MarkovArmSpec,
    params: &Example1Params,
    sample_index: usize,
    paths: usize,
    seed: u64,
    exec: Execution,
) -> Result<Estimate> {
    if sample_index == 0 {
        return Err(Error::config("sample index counts from 1"));
    }
    chunked_moments(paths, exec, |path| {
        let s = run_example1_policy(chain, params, sample_index, derive_seed(seed, &[path as u64]))?;
        Ok((s.values[0] == 1.0).then(|| s.values[sample_index - 1]))
    })?
    .estimate()
}

/// Mean of the sticky sampler's values; each path contributes the average of
/// its `samples` values and the standard error is taken across paths.
pub fn sticky_sampler_mean(
    chain: &MarkovArmSpec,
    gap: usize,
    samples: usize,
    paths: usize,
    seed: u64,
    exec: Execution,
) -> Result<Estimate> {
    if samples == 0 {
        return Err(Error::config("need at least one sample per path"));
    }
    chunked_moments(paths, exec, |path| {
        let s = run_sticky_sampler(chain, gap, samples, derive_seed(seed, &[path as u64]))?;
        Ok(Some(s.values.iter().sum::<f64>() / samples as f64))
    })?
    .estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policies::gp_m_star;
    use crate::policies::Adjustment;
    use crate::processes::CovarianceSpec;
    use approx::assert_abs_diff_eq;

    fn bernoulli_ucb(runs_n: usize) -> Experiment {
        Experiment {
            name: "bernoulli".into(),
            environment: Environment::Markov(vec![
                MarkovArmSpec::bernoulli(0.6).unwrap(),
                MarkovArmSpec::bernoulli(0.4).unwrap(),
            ]),
            policy: PolicyKind::PhiUcb(MixingProfile::from_sum_bound(0.0).unwrap()),
            horizon: runs_n,
            bounds: vec![BoundKind::Theorem2, BoundKind::Prop4],
        }
    }

    #[test]
    fn deterministic_env_has_zero_variance() {
        let exp = Experiment {
            name: "det".into(),
            environment: Environment::Markov(vec![
                MarkovArmSpec::constant(0.3).unwrap(),
                MarkovArmSpec::constant(0.7).unwrap(),
            ]),
            policy: PolicyKind::BestArm,
            horizon: 10,
            bounds: vec![],
        };
        let r = monte_carlo(&exp, 5, 1, Execution::Parallel, 2).unwrap();
        assert_eq!(r.regret_bar.mean, 0.0);
        assert_eq!(r.regret_bar.se, 0.0);
        assert_eq!(r.regret_plus.mean, 0.0);
        assert_eq!(r.traces.len(), 2);
        assert_eq!(r.mean_counts, vec![0.0, 10.0]);
    }

    #[test]
    fn deterministic_and_execution_independent() {
        let exp = bernoulli_ucb(300);
        let a = monte_carlo(&exp, 40, 7, Execution::Parallel, 3).unwrap();
        let b = monte_carlo(&exp, 40, 7, Execution::Sequential, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.regret_curve.len(), 300);
        assert_abs_diff_eq!(*a.regret_curve.last().unwrap(), a.regret_bar.mean, epsilon = 1e-9);
        assert!(a.bound("theorem2").unwrap() > a.regret_bar.mean);
        assert!(a.bound("prop4").is_some());
    }

    #[test]
    fn se_scales_with_runs() {
        let exp = bernoulli_ucb(200);
        let small = monte_carlo(&exp, 500, 11, Execution::Parallel, 0).unwrap();
        let large = monte_carlo(&exp, 1000, 12, Execution::Parallel, 0).unwrap();
        let ratio = large.regret_bar.se / small.regret_bar.se;
        assert!((ratio - 0.5f64.sqrt()).abs() < 0.2 * 0.5f64.sqrt(), "ratio {ratio}");
    }

    #[test]
    fn pairing_rules() {
        let params = gp_m_star(0.1, 0.01, 1.0, 2, Adjustment::Off).unwrap();
        let mut exp = bernoulli_ucb(100);
        exp.policy = PolicyKind::GpSwitch(params);
        exp.bounds.clear();
        let err = monte_carlo(&exp, 2, 0, Execution::Sequential, 0)
            .unwrap_err()
            .to_string();
        assert!(err.contains("gp-switch") && err.contains("markov"), "{err}");

        let cov = CovarianceSpec::exp_power(0.01, 1.0).unwrap();
        exp.environment = Environment::Gaussian(GaussianEnvSpec::new(vec![0.1, 0.0], cov, 0.1).unwrap());
        exp.horizon = 200;
        exp.bounds = vec![BoundKind::Prop5];
        let r = monte_carlo(&exp, 4, 0, Execution::Parallel, 0).unwrap();
        assert!(r.bound("prop5").unwrap() > 0.0);

        exp.bounds = vec![BoundKind::Theorem2];
        assert!(monte_carlo(&exp, 4, 0, Execution::Parallel, 0).is_err());
        assert!(monte_carlo(&bernoulli_ucb(10), 1, 0, Execution::Parallel, 0).is_err());
    }

    #[test]
    fn run_errors_carry_the_index() {
        let mut exp = bernoulli_ucb(10);
        exp.policy = PolicyKind::Example1(Example1Params::new(0.1, 0.05).unwrap());
        exp.environment = Environment::Markov(vec![MarkovArmSpec::bernoulli(0.5).unwrap(); 3]);
        exp.bounds.clear();
        assert!(exp.validate().is_err());
    }

    #[test]
    fn slope_of_exact_log_curve() {
        let curve: Vec<f64> = (1..=1000).map(|t| 3.0 * (t as f64).ln() + 1.0).collect();
        assert_abs_diff_eq!(log_slope(&curve, 10, 1000).unwrap(), 3.0, epsilon = 1e-9);
        assert!(log_slope(&curve, 0, 10).is_err());
    }

    #[test]
    fn iid_sticky_sampler_is_unbiased() {
        let chain = MarkovArmSpec::two_state(0.5, [1.0, 0.0]).unwrap();
        let est = sticky_sampler_mean(&chain, 2, 20, 5000, 3, Execution::Parallel).unwrap();
        assert!((est.mean - 0.5).abs() < 4.0 * est.se, "{est:?}");
        let cond = example1_conditional_mean(
            &chain,
            &Example1Params::new(0.5, 0.05).unwrap(),
            10,
            5000,
            3,
            Execution::Parallel,
        )
        .unwrap();
        assert!(cond.count > 2000 && cond.count < 3000);
    }
}
