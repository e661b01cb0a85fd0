//! Switching policy for strongly dependent Gaussian arms.
//!
//! Time is cut into cycles of `m*` rounds. Phase I pulls arm `i` at cycle
//! offset `i`; Phase II plays the arm with the largest Phase I observation
//! for the remaining `m* − k` rounds. Slowly decaying covariance makes the
//! current leader likely to stay ahead for the whole cycle.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{min_argmax, Feed, PlayTrace};
use crate::error::{Error, Result};
use crate::processes::PayoffMatrix;

/// Upper end of the search for the adjusted cycle length.
const ADJUSTMENT_SEARCH_CAP: usize = 1 << 24;

/// Treatment of the cycle-length adjustment step that follows the base
/// formula.
///
/// `Literal` reads the condition as
/// `Δ < sqrt(8 m^α) / (sqrt(2c) · ((m − k)^α + k^α))` and, when it holds at
/// the base `m*`, replaces `m*` by the smallest `m > k` with
/// `Δ ≥ sqrt(8 m^α) / (sqrt(2c) · ((m − k)^α + k^α))`. If no such `m` exists
/// below the search cap, `m*` is kept. `Off` skips the step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Adjustment {
    #[default]
    Literal,
    Off,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpPolicyParams {
    pub k: usize,
    pub delta: f64,
    pub c: f64,
    pub alpha: f64,
    /// Cycle length.
    pub m_star: usize,
    /// Cycle length from the closed form, before either guard step.
    pub m_base: usize,
    /// Whether the adjustment step replaced `m*`.
    pub adjusted: bool,
    /// `8c·m*^α`.
    pub a_m: f64,
    /// `c((m* − k)^α + k^α)`.
    pub b_m: f64,
}

impl GpPolicyParams {
    /// Parameters for a fixed cycle length, bypassing the closed form.
    pub fn with_cycle(m_star: usize, k: usize, delta: f64, c: f64, alpha: f64) -> Result<Self> {
        validate(delta, c, alpha, k)?;
        if m_star <= k {
            return Err(Error::config(format!(
                "cycle length {m_star} must exceed the arm count {k}"
            )));
        }
        let (a_m, b_m) = cycle_constants(m_star, k, c, alpha);
        Ok(Self {
            k,
            delta,
            c,
            alpha,
            m_star,
            m_base: m_star,
            adjusted: false,
            a_m,
            b_m,
        })
    }
}

fn validate(delta: f64, c: f64, alpha: f64, k: usize) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::spec(format!("Hölder constant c must be positive, got {c}")));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::spec(format!(
            "Hölder exponent alpha must lie in (0,1], got {alpha}"
        )));
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::spec(format!(
            "delta must be finite and non-negative, got {delta}"
        )));
    }
    if k == 0 {
        return Err(Error::spec("at least one arm is required"));
    }
    Ok(())
}

fn cycle_constants(m: usize, k: usize, c: f64, alpha: f64) -> (f64, f64) {
    let a_m = 8.0 * c * (m as f64).powf(alpha);
    let b_m = c * (((m - k) as f64).powf(alpha) + (k as f64).powf(alpha));
    (a_m, b_m)
}

/// `sqrt(8 m^α) / (sqrt(2c) · ((m − k)^α + k^α))`.
pub(crate) fn adjustment_threshold(m: usize, k: usize, c: f64, alpha: f64) -> f64 {
    let mf = m as f64;
    (8.0 * mf.powf(alpha)).sqrt() / ((2.0 * c).sqrt() * (((m - k) as f64).powf(alpha) + (k as f64).powf(alpha)))
}

/// Cycle length `m* = ⌈(√π(Δ + √2) / (2α c^{3/2}))^{1/(1+α)}⌉`, raised to
/// `k + 1` when too short, then passed through the adjustment step.
pub fn gp_m_star(delta: f64, c: f64, alpha: f64, k: usize, adjustment: Adjustment) -> Result<GpPolicyParams> {
    validate(delta, c, alpha, k)?;
    let base = (PI.sqrt() * (delta + 2f64.sqrt()) / (2.0 * alpha * c.powf(1.5))).powf(1.0 / (1.0 + alpha));
    if !base.is_finite() || base > ADJUSTMENT_SEARCH_CAP as f64 * 64.0 {
        return Err(Error::config(format!("cycle length {base:e} is too large to run")));
    }
    let m_base = base.ceil() as usize;
    let mut m_star = m_base.max(k + 1);
    let mut adjusted = false;
    if adjustment == Adjustment::Literal && delta < adjustment_threshold(m_star, k, c, alpha) {
        if let Some(m) = (k + 1..=ADJUSTMENT_SEARCH_CAP).find(|&m| delta >= adjustment_threshold(m, k, c, alpha)) {
            adjusted = m != m_star;
            m_star = m;
        }
    }
    let (a_m, b_m) = cycle_constants(m_star, k, c, alpha);
    Ok(GpPolicyParams {
        k,
        delta,
        c,
        alpha,
        m_star,
        m_base,
        adjusted,
        a_m,
        b_m,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpRun {
    pub trace: PlayTrace,
    /// Arm chosen for Phase II in each (possibly truncated) cycle.
    pub choices: Vec<usize>,
}

/// Plays cycles of length `m*` until `n` rounds are used; the final cycle is
/// truncated at `n`.
pub fn run_gp_switching(env: &PayoffMatrix, params: &GpPolicyParams, n: usize) -> Result<GpRun> {
    let k = env.arms();
    if params.k != k {
        return Err(Error::config(format!(
            "policy parameters were computed for {} arms, environment has {k}",
            params.k
        )));
    }
    if n < params.m_star {
        return Err(Error::config(format!(
            "horizon {n} is shorter than one cycle (m* = {})",
            params.m_star
        )));
    }
    let mut feed = Feed::new(env, n)?;
    let mut choices = Vec::with_capacity(n / params.m_star + 1);
    let mut observed = vec![f64::NEG_INFINITY; k];
    'cycles: while feed.remaining() > 0 {
        for (arm, slot) in observed.iter_mut().enumerate() {
            match feed.pull(arm) {
                Some(x) => *slot = x,
                None => break 'cycles,
            }
        }
        let leader = min_argmax(observed.iter().copied());
        choices.push(leader);
        for _ in 0..params.m_star - k {
            if feed.pull(leader).is_none() {
                break 'cycles;
            }
        }
    }
    Ok(GpRun {
        trace: feed.into_trace(),
        choices,
    })
}
