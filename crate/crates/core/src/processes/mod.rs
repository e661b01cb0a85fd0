//! Stationary pay-off processes.
//!
//! An environment is realised up front as a [`PayoffMatrix`] holding every
//! arm's pay-off at every round. Policies never see the matrix directly;
//! they play through [`crate::policies::Feed`], which reveals only the
//! chosen arm. Oracles (hindsight regret, brute-force values) read the full
//! matrix.

mod gaussian;
mod markov;

pub use gaussian::{
    sample_gaussian_paths, CovarianceFamily, CovarianceSpec, GaussianEnvSpec, GaussianSampler,
    DEFAULT_FACTORIZATION_CAP, JITTER, JITTER_RETRY,
};
pub use markov::{sample_markov_paths, stationary_mean, MarkovArmSpec};

use crate::error::{Error, Result};

/// Hidden `n × k` pay-off field; row `t` (0-based) holds every arm's value
/// at round `t + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffMatrix {
    horizon: usize,
    arms: usize,
    values: Vec<f64>,
}

impl PayoffMatrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let arms = rows.first().map(Vec::len).unwrap_or(0);
        if arms == 0 {
            return Err(Error::Shape(
                "pay-off matrix needs at least one arm and one round".into(),
            ));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != arms) {
            return Err(Error::Shape(format!(
                "row {bad} has {} arms, expected {arms}",
                rows[bad].len()
            )));
        }
        Ok(Self {
            horizon: rows.len(),
            arms,
            values: rows.concat(),
        })
    }

    /// Builds a matrix from per-arm columns of equal length.
    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let arms = columns.len();
        let horizon = columns.first().map(Vec::len).unwrap_or(0);
        if arms == 0 || horizon == 0 {
            return Err(Error::Shape(
                "pay-off matrix needs at least one arm and one round".into(),
            ));
        }
        if columns.iter().any(|c| c.len() != horizon) {
            return Err(Error::Shape("arm columns have different lengths".into()));
        }
        let mut values = vec![0.0; horizon * arms];
        for (arm, col) in columns.iter().enumerate() {
            for (t, &v) in col.iter().enumerate() {
                values[t * arms + arm] = v;
            }
        }
        Ok(Self { horizon, arms, values })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn arms(&self) -> usize {
        self.arms
    }

    /// Pay-off of `arm` at 0-based round index `t`.
    #[inline]
    pub fn get(&self, t: usize, arm: usize) -> f64 {
        debug_assert!(t < self.horizon && arm < self.arms);
        self.values[t * self.arms + arm]
    }

    #[inline]
    pub fn row(&self, t: usize) -> &[f64] {
        &self.values[t * self.arms..(t + 1) * self.arms]
    }

    pub fn column(&self, arm: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.horizon).map(move |t| self.get(t, arm))
    }

    /// Largest pay-off in round `t` and the smallest arm index attaining it.
    pub fn row_max(&self, t: usize) -> (usize, f64) {
        self.row(t).iter().copied().enumerate().fold(
            (0, f64::NEG_INFINITY),
            |best, (i, v)| if v > best.1 { (i, v) } else { best },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rows_and_columns_agree() {
        let a = PayoffMatrix::from_rows(&[vec![0.1, 0.9], vec![0.8, 0.2]]).unwrap();
        let b = PayoffMatrix::from_columns(&[vec![0.1, 0.8], vec![0.9, 0.2]]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.horizon(), 2);
        assert_eq!(a.arms(), 2);
        assert_eq!(a.row_max(0), (1, 0.9));
        assert_eq!(a.row_max(1), (0, 0.8));
    }

    #[test]
    fn ragged_input_is_rejected() {
        assert!(PayoffMatrix::from_rows(&[vec![0.1, 0.9], vec![0.8]]).is_err());
        assert!(PayoffMatrix::from_columns(&[vec![0.1], vec![]]).is_err());
        assert!(PayoffMatrix::from_rows(&[]).is_err());
    }

    #[test]
    fn row_max_ties_pick_smallest_index() {
        let m = PayoffMatrix::from_rows(&[vec![0.5, 0.5, 0.2]]).unwrap();
        assert_eq!(m.row_max(0), (0, 0.5));
    }
}
