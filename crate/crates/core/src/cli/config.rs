//! Declarative scenario files.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mixing::MixingProfile;
use crate::policies::{gp_m_star, Adjustment, Example1Params};
use crate::processes::{CovarianceFamily, CovarianceSpec, GaussianEnvSpec, MarkovArmSpec};
use crate::regret::{BoundKind, Environment, Experiment, PolicyKind};

pub const DEFAULT_RUNS: usize = 500;
pub const DEFAULT_TRACE_RUNS: usize = 20;

fn default_runs() -> usize {
    DEFAULT_RUNS
}

fn default_trace_runs() -> usize {
    DEFAULT_TRACE_RUNS
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub environment: EnvironmentConfig,
    pub policy: PolicyConfig,
    pub horizon: usize,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub seed: u64,
    #[serde(default)]
    pub bounds: Vec<BoundName>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Number of leading runs whose full traces are written out.
    #[serde(default = "default_trace_runs")]
    pub trace_runs: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling: Option<CouplingConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EnvironmentConfig {
    Markov {
        arms: Vec<ArmConfig>,
    },
    Gaussian {
        means: Vec<f64>,
        delta_bound: f64,
        covariance: CovarianceConfig,
    },
    Deterministic {
        values: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ArmConfig {
    TwoState {
        epsilon: f64,
        payoffs: [f64; 2],
    },
    Bernoulli {
        p: f64,
    },
    Constant {
        value: f64,
    },
    /// General finite chain; `initial` defaults to the stationary law.
    Chain {
        transition: Vec<Vec<f64>>,
        payoff: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CovarianceConfig {
    pub family: CovarianceFamily,
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolicyConfig {
    PhiUcb {
        theta: f64,
    },
    GpSwitch {
        delta: f64,
        c: f64,
        alpha: f64,
        #[serde(default)]
        adjustment: Adjustment,
    },
    BestArm {},
    ClassicUcb {},
    Example1 {
        epsilon: f64,
        delta: f64,
    },
    HindsightOracle {},
}

impl PolicyConfig {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyConfig::PhiUcb { .. } => "phi-ucb",
            PolicyConfig::GpSwitch { .. } => "gp-switch",
            PolicyConfig::BestArm {} => "best-arm",
            PolicyConfig::ClassicUcb {} => "classic-ucb",
            PolicyConfig::Example1 { .. } => "example1",
            PolicyConfig::HindsightOracle {} => "hindsight-oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundName {
    Theorem2,
    Prop3,
    Prop4,
    Prop5,
}

/// Conditional-mean probe of the adversarial sampler.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingConfig {
    /// `m` in `E(X_{τ_m} | X_{τ_1} = 1)`.
    pub sample_index: usize,
    pub paths: usize,
}

/// Shipped scenarios, in acceptance order.
pub const SHIPPED_SCENARIOS: [(&str, &str); 6] = [
    ("micro_vstar", include_str!("../../scenarios/micro_vstar.toml")),
    ("iid_theorem2", include_str!("../../scenarios/iid_theorem2.toml")),
    ("mixing_theorem2", include_str!("../../scenarios/mixing_theorem2.toml")),
    (
        "example1_coupling",
        include_str!("../../scenarios/example1_coupling.toml"),
    ),
    (
        "gp_switch_strong",
        include_str!("../../scenarios/gp_switch_strong.toml"),
    ),
    (
        "gp_best_arm_strong",
        include_str!("../../scenarios/gp_best_arm_strong.toml"),
    ),
];

pub fn shipped_scenario(name: &str) -> Option<&'static str> {
    SHIPPED_SCENARIOS.iter().find(|(n, _)| *n == name).map(|(_, s)| *s)
}

impl ScenarioConfig {
    /// Parses and validates; `origin` only labels error messages.
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Scenario {
            path: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })?;
        config.experiment().map_err(|e| Error::Scenario {
            path: origin.to_string(),
            message: e.to_string(),
        })?;
        Ok(config)
    }

    /// Reads a scenario file, or a shipped scenario by name when no file of
    /// that name exists.
    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = match std::fs::read_to_string(path) {
            Ok(text) => text,
            Err(e) => match path.to_str().and_then(shipped_scenario) {
                Some(text) => text.to_string(),
                None => return Err(e.into()),
            },
        };
        let config = Self::parse(&text, &path.display().to_string())?;
        Ok((config, text))
    }

    pub fn environment(&self) -> Result<Environment> {
        match &self.environment {
            EnvironmentConfig::Markov { arms } => {
                let specs = arms
                    .iter()
                    .enumerate()
                    .map(|(i, arm)| {
                        arm.build()
                            .map_err(|e| Error::config(format!("environment.arms[{i}]: {e}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(Environment::Markov(specs))
            }
            EnvironmentConfig::Deterministic { values } => Ok(Environment::Markov(
                values
                    .iter()
                    .map(|&v| MarkovArmSpec::constant(v))
                    .collect::<Result<_>>()?,
            )),
            EnvironmentConfig::Gaussian {
                means,
                delta_bound,
                covariance,
            } => {
                let cov = CovarianceSpec {
                    family: covariance.family,
                    c: covariance.c,
                    alpha: covariance.alpha,
                };
                cov.validate()?;
                Ok(Environment::Gaussian(GaussianEnvSpec::new(
                    means.clone(),
                    cov,
                    *delta_bound,
                )?))
            }
        }
    }

    fn env_kind(&self) -> &'static str {
        match self.environment {
            EnvironmentConfig::Markov { .. } => "markov",
            EnvironmentConfig::Gaussian { .. } => "gaussian",
            EnvironmentConfig::Deterministic { .. } => "deterministic",
        }
    }

    fn pairing_error(&self, need: &str) -> Error {
        Error::config(format!(
            "[policy] `{}` requires {need}, but [environment] is `{}`",
            self.policy.name(),
            self.env_kind()
        ))
    }

    /// Builds the Monte Carlo experiment, checking every cross-block rule.
    pub fn experiment(&self) -> Result<Experiment> {
        if self.runs < 2 {
            return Err(Error::config(format!("runs must be at least 2, got {}", self.runs)));
        }
        let environment = self.environment()?;
        let k = environment.arms();
        let policy = match &self.policy {
            PolicyConfig::PhiUcb { theta } => PolicyKind::PhiUcb(MixingProfile::from_sum_bound(*theta)?),
            PolicyConfig::GpSwitch {
                delta,
                c,
                alpha,
                adjustment,
            } => {
                let Environment::Gaussian(spec) = &environment else {
                    return Err(self.pairing_error("a gaussian environment"));
                };
                if *delta < spec.delta_bound() {
                    return Err(Error::config(format!(
                        "[policy] delta {delta} is below the environment's mean-gap bound {}",
                        spec.delta_bound()
                    )));
                }
                let holder = CovarianceSpec::exp_power(*c, *alpha)?;
                if let Some(t) = (1..=self.horizon).find(|&t| (1.0 - spec.cov().cov(t)).abs() > holder_cap(&holder, t))
                {
                    return Err(Error::config(format!(
                        "[policy] c = {c}, alpha = {alpha} do not bound |1 − cov(t)| of the environment at lag {t}"
                    )));
                }
                PolicyKind::GpSwitch(gp_m_star(*delta, *c, *alpha, k, *adjustment)?)
            }
            PolicyConfig::BestArm {} => PolicyKind::BestArm,
            PolicyConfig::ClassicUcb {} => PolicyKind::ClassicUcb,
            PolicyConfig::HindsightOracle {} => PolicyKind::Hindsight,
            PolicyConfig::Example1 { epsilon, delta } => {
                let Environment::Markov(specs) = &environment else {
                    return Err(self.pairing_error("a markov environment"));
                };
                match specs.first().and_then(MarkovArmSpec::epsilon) {
                    Some(e) if specs.len() == 2 && (e - epsilon).abs() <= 1e-12 => {}
                    _ => {
                        return Err(Error::config(format!(
                            "[policy] `example1` needs two arms with arm 1 a two-state chain of epsilon {epsilon}"
                        )))
                    }
                }
                PolicyKind::Example1(Example1Params::new(*epsilon, *delta)?)
            }
        };

        let mut bounds = Vec::new();
        for b in &self.bounds {
            match b {
                BoundName::Theorem2 => bounds.push(BoundKind::Theorem2),
                BoundName::Prop4 => bounds.push(BoundKind::Prop4),
                BoundName::Prop5 => bounds.push(BoundKind::Prop5),
                BoundName::Prop3 => {
                    if !matches!(environment, Environment::Markov(_)) || self.horizon > 4 {
                        return Err(Error::config(
                            "bound `prop3` needs a markov or deterministic environment and horizon <= 4",
                        ));
                    }
                }
            }
        }
        if self.coupling.is_some() && !matches!(self.policy, PolicyConfig::Example1 { .. }) {
            return Err(Error::config("[coupling] applies only to policy `example1`"));
        }

        let experiment = Experiment {
            name: self.name.clone(),
            environment,
            policy,
            horizon: self.horizon,
            bounds,
        };
        experiment.validate()?;
        Ok(experiment)
    }
}

fn holder_cap(holder: &CovarianceSpec, t: usize) -> f64 {
    holder.c * (t as f64).powf(holder.alpha) + 1e-12
}

impl ArmConfig {
    fn build(&self) -> Result<MarkovArmSpec> {
        match self {
            ArmConfig::TwoState { epsilon, payoffs } => MarkovArmSpec::two_state(*epsilon, *payoffs),
            ArmConfig::Bernoulli { p } => MarkovArmSpec::bernoulli(*p),
            ArmConfig::Constant { value } => MarkovArmSpec::constant(*value),
            ArmConfig::Chain {
                transition,
                payoff,
                initial: Some(initial),
            } => MarkovArmSpec::new(transition.clone(), payoff.clone(), initial.clone()),
            ArmConfig::Chain {
                transition,
                payoff,
                initial: None,
            } => MarkovArmSpec::with_stationary_start(transition.clone(), payoff.clone()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const GP_ON_MARKOV: &str = r#"
name = "bad"
horizon = 100
seed = 1

[environment]
kind = "markov"
arms = [{ type = "bernoulli", p = 0.5 }, { type = "bernoulli", p = 0.4 }]

[policy]
name = "gp-switch"
delta = 0.1
c = 0.01
alpha = 1.0
"#;

    #[test]
    fn shipped_scenarios_parse() {
        for (name, text) in SHIPPED_SCENARIOS {
            let config = ScenarioConfig::parse(text, name).unwrap();
            assert_eq!(config.name, name);
        }
    }

    #[test]
    fn pairing_error_names_both_blocks() {
        let err = ScenarioConfig::parse(GP_ON_MARKOV, "bad.toml").unwrap_err().to_string();
        assert!(err.contains("[policy]") && err.contains("gp-switch"), "{err}");
        assert!(err.contains("[environment]") && err.contains("markov"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let extra_top = GP_ON_MARKOV.replace("seed = 1", "seed = 1\nsede = 2");
        assert!(ScenarioConfig::parse(&extra_top, "x")
            .unwrap_err()
            .to_string()
            .contains("sede"));
        let extra_policy = shipped_scenario("iid_theorem2")
            .unwrap()
            .replace("theta = 0.0", "theta = 0.0\ngamma = 1");
        assert!(ScenarioConfig::parse(&extra_policy, "x")
            .unwrap_err()
            .to_string()
            .contains("gamma"));
        let extra_arm = shipped_scenario("iid_theorem2")
            .unwrap()
            .replace("p = 0.6", "p = 0.6\nq = 1");
        assert!(ScenarioConfig::parse(&extra_arm, "x")
            .unwrap_err()
            .to_string()
            .contains("q"));
    }

    #[test]
    fn physics_parameters_have_no_defaults() {
        let missing = shipped_scenario("iid_theorem2").unwrap().replace("theta = 0.0", "");
        assert!(ScenarioConfig::parse(&missing, "x")
            .unwrap_err()
            .to_string()
            .contains("theta"));
        let missing = shipped_scenario("gp_switch_strong")
            .unwrap()
            .replace("alpha = 1.0\nadjustment", "adjustment");
        assert!(ScenarioConfig::parse(&missing, "x")
            .unwrap_err()
            .to_string()
            .contains("alpha"));
    }

    #[test]
    fn operational_defaults() {
        let text = shipped_scenario("iid_theorem2").unwrap().replace("runs = 500\n", "");
        let config = ScenarioConfig::parse(&text, "x").unwrap();
        assert_eq!(config.runs, DEFAULT_RUNS);
        assert_eq!(config.trace_runs, DEFAULT_TRACE_RUNS);
        assert!(config.output_dir.is_none());
    }

    #[test]
    fn holder_constants_must_dominate() {
        let text = shipped_scenario("gp_switch_strong").unwrap().replace(
            "c = 0.01\nalpha = 1.0\nadjustment",
            "c = 0.005\nalpha = 1.0\nadjustment",
        );
        let err = ScenarioConfig::parse(&text, "x").unwrap_err().to_string();
        assert!(err.contains("cov"), "{err}");
    }

    #[test]
    fn deterministic_environment() {
        let text = r#"
name = "det"
horizon = 10
seed = 0
[environment]
kind = "deterministic"
values = [0.3, 0.7]
[policy]
name = "best-arm"
"#;
        let exp = ScenarioConfig::parse(text, "x").unwrap().experiment().unwrap();
        assert_eq!(exp.environment.means(), vec![0.3, 0.7]);
    }
}
