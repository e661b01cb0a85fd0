use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::PayoffMatrix;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

/// Largest horizon factorised by default.
pub const DEFAULT_FACTORIZATION_CAP: usize = 4096;
/// Diagonal jitter added before the first factorization attempt.
pub const JITTER: f64 = 1e-10;
/// Jitter used for the single retry.
pub const JITTER_RETRY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CovarianceFamily {
    /// `cov(t) = exp(−c·t^α)`.
    #[default]
    ExpPower,
}

/// Stationary covariance shared by all Gaussian arms, normalised to
/// `cov(0) = 1` and `(α, c)`-Hölder.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovarianceSpec {
    pub family: CovarianceFamily,
    pub c: f64,
    pub alpha: f64,
}

impl CovarianceSpec {
    pub fn exp_power(c: f64, alpha: f64) -> Result<Self> {
        let spec = Self {
            family: CovarianceFamily::ExpPower,
            c,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::spec(format!(
                "Hölder constant c must be positive, got {}",
                self.c
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::spec(format!(
                "Hölder exponent alpha must lie in (0,1], got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// Covariance at integer lag `lag ≥ 0`.
    pub fn cov(&self, lag: usize) -> f64 {
        match self.family {
            CovarianceFamily::ExpPower => {
                if lag == 0 {
                    1.0
                } else {
                    (-self.c * (lag as f64).powf(self.alpha)).exp()
                }
            }
        }
    }

    /// Worst `|cov(s) − cov(t)| − c|s − t|^α` over all lag pairs in
    /// `0..=max_lag`. Non-positive means the Hölder condition holds there.
    pub fn holder_margin(&self, max_lag: usize) -> f64 {
        let table: Vec<f64> = (0..=max_lag).map(|l| self.cov(l)).collect();
        let mut worst = f64::NEG_INFINITY;
        for s in 0..=max_lag {
            for t in s + 1..=max_lag {
                let gap = self.c * ((t - s) as f64).powf(self.alpha);
                worst = worst.max((table[s] - table[t]).abs() - gap);
            }
        }
        worst
    }
}

/// `k` mutually independent stationary Gaussian arms with a shared covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianEnvSpec {
    means: Vec<f64>,
    cov: CovarianceSpec,
    delta_bound: f64,
}

impl GaussianEnvSpec {
    pub fn new(means: Vec<f64>, cov: CovarianceSpec, delta_bound: f64) -> Result<Self> {
        if means.is_empty() {
            return Err(Error::spec("Gaussian environment needs at least one arm"));
        }
        if means.iter().any(|m| !m.is_finite()) {
            return Err(Error::spec("arm means must be finite"));
        }
        cov.validate()?;
        let hi = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = means.iter().copied().fold(f64::INFINITY, f64::min);
        if delta_bound < hi - lo - 1e-12 {
            return Err(Error::spec(format!(
                "delta_bound {delta_bound} is below the largest mean gap {}",
                hi - lo
            )));
        }
        Ok(Self {
            means,
            cov,
            delta_bound,
        })
    }

    pub fn arms(&self) -> usize {
        self.means.len()
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn cov(&self) -> &CovarianceSpec {
        &self.cov
    }

    pub fn delta_bound(&self) -> f64 {
        self.delta_bound
    }
}

/// Lower-triangular factor of the `n × n` covariance matrix of one arm,
/// reusable across runs.
#[derive(Debug, Clone)]
pub struct GaussianSampler {
    n: usize,
    // row-major packed lower triangle: row i occupies i*(i+1)/2 .. +i+1
    factor: Vec<f64>,
    jitter: f64,
}

impl GaussianSampler {
    pub fn new(cov: &CovarianceSpec, n: usize) -> Result<Self> {
        Self::with_cap(cov, n, DEFAULT_FACTORIZATION_CAP)
    }

    pub fn with_cap(cov: &CovarianceSpec, n: usize, cap: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("horizon must be at least 1"));
        }
        if n > cap {
            return Err(Error::Capacity {
                what: "Gaussian path factorization (horizon)",
                required: n as u128,
                limit: cap as u128,
            });
        }
        let lags: Vec<f64> = (0..n).map(|l| cov.cov(l)).collect();
        let mut last_jitter = JITTER;
        for jitter in [JITTER, JITTER_RETRY] {
            last_jitter = jitter;
            let m = DMatrix::from_fn(n, n, |i, j| lags[i.abs_diff(j)] + if i == j { jitter } else { 0.0 });
            if let Some(chol) = m.cholesky() {
                let l = chol.l();
                let mut factor = Vec::with_capacity(n * (n + 1) / 2);
                for i in 0..n {
                    factor.extend((0..=i).map(|j| l[(i, j)]));
                }
                return Ok(Self { n, factor, jitter });
            }
        }
        Err(Error::Factorization {
            window: n - 1,
            jitter: last_jitter,
        })
    }

    pub fn horizon(&self) -> usize {
        self.n
    }

    /// Jitter that made the factorization succeed.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// One path with the given mean: `mean + L·z`, `z ~ N(0, I)`.
    pub fn sample_path(&self, mean: f64, rng: &mut Rng) -> Vec<f64> {
        let z: Vec<f64> = (0..self.n).map(|_| StandardNormal.sample(rng)).collect();
        let mut offset = 0;
        (0..self.n)
            .map(|i| {
                let row = &self.factor[offset..offset + i + 1];
                offset += i + 1;
                mean + row.iter().zip(&z).map(|(l, z)| l * z).sum::<f64>()
            })
            .collect()
    }

    /// Samples every arm of `spec` from its own sub-stream of `seed`.
    pub fn sample_env(&self, spec: &GaussianEnvSpec, seed: u64) -> Result<PayoffMatrix> {
        let columns: Vec<Vec<f64>> = spec
            .means
            .iter()
            .enumerate()
            .map(|(arm, &mu)| self.sample_path(mu, &mut rng::stream(seed, &[arm as u64])))
            .collect();
        PayoffMatrix::from_columns(&columns)
    }
}

/// Exact joint sampling of every arm over `n` rounds.
pub fn sample_gaussian_paths(spec: &GaussianEnvSpec, n: usize, seed: u64) -> Result<PayoffMatrix> {
    GaussianSampler::new(&spec.cov, n)?.sample_env(spec, seed)
}
