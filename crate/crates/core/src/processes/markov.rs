use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::PayoffMatrix;
use crate::error::{Error, Result};
use crate::rng::{self, Rng};

const ROW_TOL: f64 = 1e-12;
const STATIONARY_TOL: f64 = 1e-10;

/// A finite-state stationary Markov chain with a deterministic pay-off per
/// state. The chain is started from its stationary distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovArmSpec {
    transition: Vec<Vec<f64>>,
    payoff: Vec<f64>,
    initial: Vec<f64>,
    epsilon: Option<f64>,
}

impl MarkovArmSpec {
    /// Validates and builds a chain. `initial` must already be stationary;
    /// nothing is renormalised or corrected.
    pub fn new(transition: Vec<Vec<f64>>, payoff: Vec<f64>, initial: Vec<f64>) -> Result<Self> {
        let spec = Self {
            transition,
            payoff,
            initial,
            epsilon: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Builds a chain whose initial law is the (unique) stationary
    /// distribution of `transition`.
    pub fn with_stationary_start(transition: Vec<Vec<f64>>, payoff: Vec<f64>) -> Result<Self> {
        let initial = stationary_distribution(&transition)?;
        Self::new(transition, payoff, initial)
    }

    /// Symmetric two-state chain that flips state with probability `epsilon`
    /// each round; stationary law is uniform. `payoffs[s]` is paid in state `s`.
    pub fn two_state(epsilon: f64, payoffs: [f64; 2]) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::spec(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        let mut spec = Self::new(
            vec![vec![1.0 - epsilon, epsilon], vec![epsilon, 1.0 - epsilon]],
            payoffs.to_vec(),
            vec![0.5, 0.5],
        )?;
        spec.epsilon = Some(epsilon);
        Ok(spec)
    }

    /// I.i.d. Bernoulli(`p`) pay-offs written as a two-state chain whose rows
    /// are both the stationary law.
    pub fn bernoulli(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::spec(format!("Bernoulli parameter must lie in [0,1], got {p}")));
        }
        let row = vec![p, 1.0 - p];
        Self::new(vec![row.clone(), row.clone()], vec![1.0, 0.0], row)
    }

    /// Single-state chain paying `value` every round.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(vec![vec![1.0]], vec![value], vec![1.0])
    }

    fn validate(&self) -> Result<()> {
        let n = self.transition.len();
        if n == 0 {
            return Err(Error::spec("chain needs at least one state"));
        }
        if self.payoff.len() != n || self.initial.len() != n {
            return Err(Error::spec(format!(
                "chain has {n} states but {} pay-offs and {} initial weights",
                self.payoff.len(),
                self.initial.len()
            )));
        }
        for (i, row) in self.transition.iter().enumerate() {
            if row.len() != n {
                return Err(Error::spec(format!(
                    "transition row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row.iter().any(|&p| !p.is_finite() || p < 0.0) {
                return Err(Error::spec(format!(
                    "transition row {i} has a negative or non-finite entry"
                )));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_TOL {
                return Err(Error::spec(format!("transition row {i} sums to {sum}, not 1")));
            }
        }
        if let Some(s) = self.payoff.iter().position(|&v| !(0.0..=1.0).contains(&v)) {
            return Err(Error::spec(format!(
                "pay-off of state {s} is {} (must lie in [0,1])",
                self.payoff[s]
            )));
        }
        if self.initial.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::spec("initial distribution has a negative entry"));
        }
        let total: f64 = self.initial.iter().sum();
        if (total - 1.0).abs() > ROW_TOL {
            return Err(Error::spec(format!("initial distribution sums to {total}, not 1")));
        }
        let drift = (0..n)
            .map(|j| {
                let next: f64 = (0..n).map(|i| self.initial[i] * self.transition[i][j]).sum();
                (next - self.initial[j]).abs()
            })
            .fold(0.0, f64::max);
        if drift > STATIONARY_TOL {
            return Err(Error::spec(format!(
                "initial distribution is not stationary (max |πT − π| = {drift:e})"
            )));
        }
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.transition.len()
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn payoff(&self) -> &[f64] {
        &self.payoff
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    /// Flip probability, when built with [`MarkovArmSpec::two_state`].
    pub fn epsilon(&self) -> Option<f64> {
        self.epsilon
    }

    pub fn stationary_mean(&self) -> f64 {
        stationary_mean(self)
    }

    pub(crate) fn sample_initial(&self, rng: &mut Rng) -> usize {
        sample_categorical(&self.initial, rng)
    }

    pub(crate) fn step(&self, state: usize, rng: &mut Rng) -> usize {
        sample_categorical(&self.transition[state], rng)
    }

    /// Draws a state path of length `n` started from the stationary law.
    pub fn sample_states(&self, n: usize, rng: &mut Rng) -> Vec<usize> {
        let mut states = Vec::with_capacity(n);
        if n == 0 {
            return states;
        }
        let mut s = self.sample_initial(rng);
        states.push(s);
        for _ in 1..n {
            s = self.step(s, rng);
            states.push(s);
        }
        states
    }
}

/// Exact `Σ_s π(s)·payoff(s)`.
pub fn stationary_mean(spec: &MarkovArmSpec) -> f64 {
    spec.initial.iter().zip(&spec.payoff).map(|(p, v)| p * v).sum()
}

/// Samples every arm independently, each from its own sub-stream of `seed`.
pub fn sample_markov_paths(specs: &[MarkovArmSpec], n: usize, seed: u64) -> Result<PayoffMatrix> {
    if n == 0 {
        return Err(Error::config("horizon must be at least 1"));
    }
    let columns: Vec<Vec<f64>> = specs
        .iter()
        .enumerate()
        .map(|(arm, spec)| {
            let mut rng = rng::stream(seed, &[arm as u64]);
            spec.sample_states(n, &mut rng)
                .into_iter()
                .map(|s| spec.payoff[s])
                .collect()
        })
        .collect();
    PayoffMatrix::from_columns(&columns)
}

fn sample_categorical(weights: &[f64], rng: &mut Rng) -> usize {
    if weights.len() == 1 {
        return 0;
    }
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    // u landed in the rounding slack above the last partial sum
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(weights.len() - 1)
}

/// Solves `πT = π, Σπ = 1` by replacing one balance equation with the
/// normalisation constraint.
fn stationary_distribution(transition: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = transition.len();
    if n == 0 || transition.iter().any(|r| r.len() != n) {
        return Err(Error::spec("transition matrix must be square and non-empty"));
    }
    let mut a = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            a[(j, i)] = transition[i][j] - if i == j { 1.0 } else { 0.0 };
        }
    }
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(n);
    b[n - 1] = 1.0;
    let pi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::spec("stationary distribution is not unique; supply it explicitly"))?;
    Ok(pi.iter().map(|&p| if p.abs() < 1e-15 { 0.0 } else { p }).collect())
}
