//! Scenario execution and artifact writing.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{BoundName, ScenarioConfig};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::mixing::{phi_dependence, ChainLaw};
use crate::policies::{brute_force_vstar, VSTAR_DEFAULT_GUARD};
use crate::processes::MarkovArmSpec;
use crate::regret::{
    example1_conditional_mean, monte_carlo, prop3_gap_bound, Environment, Estimate, PolicyKind, RegretReport,
};

pub const TRACE_HEADER: &str = "run,t,arm,payoff,cum_payoff";
pub const SUMMARY_HEADER: &str = "scenario,policy,n,runs,regret_bar,se_bar,regret_plus,se_plus,bound_name,bound_value";

/// Command-line overrides of the operational knobs.
#[derive(Debug, Clone, Default)]
pub struct RunOverrides {
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub execution: Execution,
}

/// Exhaustive optimum on a micro instance next to its mixing bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VstarCheck {
    pub horizon: usize,
    pub value: f64,
    pub n_mu_star: f64,
    pub excess: f64,
    /// `φ₁` of the joint chain, computed exactly.
    pub phi_1: f64,
    pub bound: f64,
    pub policies: u128,
}

impl VstarCheck {
    pub fn holds(&self, tolerance: f64) -> bool {
        self.excess <= self.bound + tolerance
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingCheck {
    pub sample_index: usize,
    pub paths: usize,
    pub estimate: Estimate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioOutcome {
    pub config: ScenarioConfig,
    pub report: RegretReport,
    pub vstar: Option<VstarCheck>,
    pub coupling: Option<CouplingCheck>,
    pub out_dir: Option<PathBuf>,
}

/// `brute_force_vstar` against `2nφ₁`, with `φ₁` taken from the exact joint
/// law of the independent chains.
pub fn vstar_check(specs: &[MarkovArmSpec], n: usize, guard: u128) -> Result<VstarCheck> {
    let vstar = brute_force_vstar(specs, n, guard)?;
    let laws: Vec<ChainLaw> = specs.iter().map(ChainLaw::from).collect();
    let joint = ChainLaw::product(&laws)?;
    let phi_1 = phi_dependence(&joint.pair_distribution(1)?)?;
    let mu_star = specs
        .iter()
        .map(MarkovArmSpec::stationary_mean)
        .fold(f64::NEG_INFINITY, f64::max);
    let n_mu_star = n as f64 * mu_star;
    Ok(VstarCheck {
        horizon: n,
        value: vstar.value,
        n_mu_star,
        excess: vstar.value - n_mu_star,
        phi_1,
        bound: prop3_gap_bound(n, phi_1),
        policies: vstar.policies,
    })
}

/// Runs a scenario and, when an output directory is set (override first,
/// then the config's `output_dir`), writes `trace.csv`, `summary.csv` and
/// `manifest.json` into it.
pub fn run_scenario(config: &ScenarioConfig, source: &str, overrides: &RunOverrides) -> Result<ScenarioOutcome> {
    let mut config = config.clone();
    if let Some(runs) = overrides.runs {
        config.runs = runs;
    }
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    let experiment = config.experiment()?;
    let report = monte_carlo(
        &experiment,
        config.runs,
        config.seed,
        overrides.execution,
        config.trace_runs,
    )?;

    let vstar = match (&experiment.environment, config.bounds.contains(&BoundName::Prop3)) {
        (Environment::Markov(specs), true) => Some(vstar_check(specs, config.horizon, VSTAR_DEFAULT_GUARD)?),
        _ => None,
    };
    let coupling = match (&experiment.policy, &experiment.environment, config.coupling) {
        (PolicyKind::Example1(params), Environment::Markov(specs), Some(c)) => Some(CouplingCheck {
            sample_index: c.sample_index,
            paths: c.paths,
            estimate: example1_conditional_mean(
                &specs[0],
                params,
                c.sample_index,
                c.paths,
                crate::rng::derive_seed(config.seed, &[u64::MAX]),
                overrides.execution,
            )?,
        }),
        _ => None,
    };

    let out_dir = overrides.out.clone().or_else(|| config.output_dir.clone());
    let outcome = ScenarioOutcome {
        config,
        report,
        vstar,
        coupling,
        out_dir,
    };
    if let Some(dir) = &outcome.out_dir {
        write_artifacts(&outcome, source, dir)?;
    }
    Ok(outcome)
}

pub fn trace_csv(report: &RegretReport) -> String {
    let mut out = String::from(TRACE_HEADER);
    out.push('\n');
    for (run, trace) in report.traces.iter().enumerate() {
        let mut cum = 0.0;
        for (t, (arm, x)) in trace.arms.iter().zip(&trace.payoffs).enumerate() {
            cum += x;
            let _ = writeln!(out, "{},{},{},{},{}", run + 1, t + 1, arm + 1, x, cum);
        }
    }
    out
}

/// One row per attached bound, or a single row with empty bound columns.
pub fn summary_rows(outcome: &ScenarioOutcome) -> Vec<String> {
    let r = &outcome.report;
    let prefix = format!(
        "{},{},{},{},{},{},{},{}",
        r.scenario,
        r.policy,
        r.horizon,
        r.runs,
        r.regret_bar.mean,
        r.regret_bar.se,
        r.regret_plus.mean,
        r.regret_plus.se
    );
    let mut bounds: Vec<(&str, f64)> = r.bounds.iter().map(|b| (b.name, b.value)).collect();
    if let Some(v) = &outcome.vstar {
        bounds.push(("prop3", v.bound));
    }
    if bounds.is_empty() {
        return vec![format!("{prefix},,")];
    }
    bounds
        .into_iter()
        .map(|(name, value)| format!("{prefix},{name},{value}"))
        .collect()
}

pub fn summary_csv(outcome: &ScenarioOutcome) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for row in summary_rows(outcome) {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct Build {
    package: &'static str,
    version: &'static str,
    parallel_feature: bool,
    debug_assertions: bool,
}

#[derive(Serialize)]
struct Manifest<'a> {
    scenario: &'a str,
    seed: u64,
    runs: usize,
    horizon: usize,
    config: &'a ScenarioConfig,
    config_source: &'a str,
    build: Build,
    mu_star: f64,
    regret_bar: Estimate,
    regret_plus: Estimate,
    mean_counts: &'a [f64],
    bounds: Vec<(&'static str, f64)>,
    vstar: Option<&'a VstarCheck>,
    coupling: Option<&'a CouplingCheck>,
}

pub fn manifest_json(outcome: &ScenarioOutcome, source: &str) -> Result<String> {
    let r = &outcome.report;
    let manifest = Manifest {
        scenario: &r.scenario,
        seed: r.seed,
        runs: r.runs,
        horizon: r.horizon,
        config: &outcome.config,
        config_source: source,
        build: Build {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            parallel_feature: cfg!(feature = "parallel"),
            debug_assertions: cfg!(debug_assertions),
        },
        mu_star: r.mu_star,
        regret_bar: r.regret_bar,
        regret_plus: r.regret_plus,
        mean_counts: &r.mean_counts,
        bounds: r.bounds.iter().map(|b| (b.name, b.value)).collect(),
        vstar: outcome.vstar.as_ref(),
        coupling: outcome.coupling.as_ref(),
    };
    serde_json::to_string_pretty(&manifest).map_err(|e| Error::config(format!("manifest serialization: {e}")))
}

fn write_artifacts(outcome: &ScenarioOutcome, source: &str, dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("trace.csv"), trace_csv(&outcome.report))?;
    std::fs::write(dir.join("summary.csv"), summary_csv(outcome))?;
    std::fs::write(dir.join("manifest.json"), manifest_json(outcome, source)? + "\n")?;
    Ok(())
}
