//! Bandit policies and the exhaustive optimal-value oracle.
//!
//! Every policy plays through a [`Feed`], which reveals only the pay-off
//! of the arm pulled in the current round. All argmax selections break
//! ties towards the smallest arm index, so a policy replayed on the same
//! [`PayoffMatrix`] always produces the same trace.

mod baselines;
mod example1;
mod gp;
mod ucb;
mod vstar;

pub use baselines::{baseline_best_arm, baseline_classic_ucb, baseline_hindsight, classic_ucb_index};
pub use example1::{
    example1_trace, play_example1, run_example1_policy, run_sticky_sampler, Example1Params, RandomTimeSample,
};
pub use gp::{gp_m_star, run_gp_switching, Adjustment, GpPolicyParams, GpRun};
pub use ucb::{run_phi_ucb, run_phi_ucb_with_state, ucb_index, Batch, UcbState};
pub use vstar::{brute_force_vstar, vstar_dynamic_programming, VstarResult, VSTAR_DEFAULT_GUARD};

use crate::error::{Error, Result};
use crate::processes::PayoffMatrix;

/// Arms played and pay-offs received, one entry per round.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PlayTrace {
    pub arms: Vec<usize>,
    pub payoffs: Vec<f64>,
}

impl PlayTrace {
    pub fn len(&self) -> usize {
        self.arms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arms.is_empty()
    }

    pub fn total(&self) -> f64 {
        self.payoffs.iter().sum()
    }

    /// `T_j(n)` for every arm.
    pub fn counts(&self, arms: usize) -> Vec<usize> {
        let mut counts = vec![0; arms];
        for &a in &self.arms {
            counts[a] += 1;
        }
        counts
    }
}

/// A policy's window onto a hidden pay-off matrix.
#[derive(Debug)]
pub struct Feed<'a> {
    matrix: &'a PayoffMatrix,
    horizon: usize,
    trace: PlayTrace,
}

impl<'a> Feed<'a> {
    /// Exposes the first `horizon` rounds of `matrix`.
    pub fn new(matrix: &'a PayoffMatrix, horizon: usize) -> Result<Self> {
        if horizon > matrix.horizon() {
            return Err(Error::config(format!(
                "horizon {horizon} exceeds the {} sampled rounds",
                matrix.horizon()
            )));
        }
        Ok(Self {
            matrix,
            horizon,
            trace: PlayTrace {
                arms: Vec::with_capacity(horizon),
                payoffs: Vec::with_capacity(horizon),
            },
        })
    }

    pub fn arms(&self) -> usize {
        self.matrix.arms()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// 1-based index of the next round to be played.
    pub fn round(&self) -> usize {
        self.trace.len() + 1
    }

    pub fn remaining(&self) -> usize {
        self.horizon - self.trace.len()
    }

    /// Plays `arm` in the current round; `None` once the horizon is reached.
    pub fn pull(&mut self, arm: usize) -> Option<f64> {
        assert!(arm < self.arms(), "arm {arm} out of range");
        if self.remaining() == 0 {
            return None;
        }
        let x = self.matrix.get(self.trace.len(), arm);
        self.trace.arms.push(arm);
        self.trace.payoffs.push(x);
        Some(x)
    }

    pub fn into_trace(self) -> PlayTrace {
        self.trace
    }
}

/// Index of the first maximum; NaN entries never win.
pub(crate) fn min_argmax(values: impl IntoIterator<Item = f64>) -> usize {
    let mut best = (0, f64::NEG_INFINITY);
    for (i, v) in values.into_iter().enumerate() {
        if v > best.1 {
            best = (i, v);
        }
    }
    best.0
}
