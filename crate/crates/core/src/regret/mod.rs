//! Regret accounting, closed-form bounds and the Monte Carlo harness.
//!
//! `R̄(n) = nμ* − Σ_t E X_{t,π_t}` is measured against the best stationary
//! mean; `R⁺(n) = Σ_t E(max_i X_{t,i} − X_{t,π_t})` against the per-round
//! maximum of the hidden matrix. Both are estimated with realized pay-offs.

mod bounds;
mod gaussian;
mod harness;

pub use bounds::{
    lemma1_bias_bound, phi_total, prop2_bias_bound, prop3_gap_bound, prop4_bound, prop5_bound, theorem2_bound,
    IID_CONSTANT,
};
pub use gaussian::{
    gaussian_plus_bounds, plus_part_monte_carlo, std_normal_cdf, std_normal_pdf, GaussianPlusReport, GaussianTailTerms,
};
pub use harness::{
    example1_conditional_mean, log_slope, monte_carlo, sticky_sampler_mean, BoundKind, BoundValue, Environment,
    Experiment, PolicyKind, RegretReport,
};

use crate::error::{Error, Result};
use crate::policies::PlayTrace;
use crate::processes::PayoffMatrix;

/// Number of standard errors used for every confidence statement.
pub const CONFIDENCE_RADIUS: f64 = 3.0;

/// Streaming mean and sum of squared deviations (Welford), mergeable.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Moments {
    count: usize,
    mean: f64,
    m2: f64,
}

impl Moments {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&mut self, other: &Moments) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n = (self.count + other.count) as f64;
        let d = other.mean - self.mean;
        self.mean += d * other.count as f64 / n;
        self.m2 += other.m2 + d * d * self.count as f64 * other.count as f64 / n;
        self.count += other.count;
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn estimate(&self) -> Result<Estimate> {
        if self.count < 2 {
            return Err(Error::config(format!(
                "a standard error needs at least 2 samples, got {}",
                self.count
            )));
        }
        let var = (self.m2 / (self.count - 1) as f64).max(0.0);
        Ok(Estimate {
            mean: self.mean,
            se: (var / self.count as f64).sqrt(),
            count: self.count,
        })
    }
}

impl FromIterator<f64> for Moments {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut m = Moments::default();
        iter.into_iter().for_each(|x| m.push(x));
        m
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl Estimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        samples.iter().copied().collect::<Moments>().estimate()
    }

    /// `mean ± CONFIDENCE_RADIUS·se`.
    pub fn interval(&self) -> (f64, f64) {
        (
            self.mean - CONFIDENCE_RADIUS * self.se,
            self.mean + CONFIDENCE_RADIUS * self.se,
        )
    }

    /// `√(se₁² + se₂²)`, for comparing two independent estimates.
    pub fn combined_se(&self, other: &Estimate) -> f64 {
        self.se.hypot(other.se)
    }
}

/// `nμ*` minus the across-run mean of total pay-off.
pub fn pseudo_regret_bar(traces: &[PlayTrace], mu_star: f64, n: usize) -> Result<Estimate> {
    if let Some((run, t)) = traces.iter().enumerate().find(|(_, t)| t.len() != n) {
        return Err(Error::Shape(format!("run {run} has {} rounds, expected {n}", t.len())));
    }
    let totals: Vec<f64> = traces.iter().map(|t| shortfall(t, mu_star)).collect();
    Estimate::from_samples(&totals)
}

/// Across-run mean of `Σ_t (max_i X_{t,i} − X_{t,π_t})`; `hidden[r]` is the
/// matrix run `r` was played on.
pub fn regret_plus(traces: &[PlayTrace], hidden: &[PayoffMatrix]) -> Result<Estimate> {
    if hidden.len() != traces.len() {
        return Err(Error::Shape(format!(
            "{} traces but {} hidden matrices",
            traces.len(),
            hidden.len()
        )));
    }
    let per_run = traces
        .iter()
        .zip(hidden)
        .enumerate()
        .map(|(run, (trace, env))| {
            if trace.len() > env.horizon() {
                return Err(Error::Shape(format!(
                    "run {run} has {} rounds but its matrix only {}",
                    trace.len(),
                    env.horizon()
                )));
            }
            Ok(hindsight_gap(trace, env))
        })
        .collect::<Result<Vec<f64>>>()?;
    Estimate::from_samples(&per_run)
}

/// `Σ_t (μ* − X_{t,π_t})`, summed per round so constant pay-offs cancel exactly.
pub(crate) fn shortfall(trace: &PlayTrace, mu_star: f64) -> f64 {
    trace.payoffs.iter().map(|x| mu_star - x).sum()
}

pub(crate) fn hindsight_gap(trace: &PlayTrace, env: &PayoffMatrix) -> f64 {
    trace
        .payoffs
        .iter()
        .enumerate()
        .map(|(t, x)| env.row_max(t).1 - x)
        .sum()
}
