//! Batched UCB for jointly φ-mixing arms.
//!
//! After one initial pull per arm, the arm with the largest index
//! `X̄_u + sqrt(8ξ(1/8 + ln t) / 2^{s_u}) + ϑ / 2^{s_u − 1}` is played for
//! `2^{s_u}` consecutive rounds, its mean is recomputed from that batch
//! alone and `s_u` is incremented. Long consecutive batches keep the bias
//! introduced by the policy's own random times at `O(ϑ / 2^s)`.

use super::{min_argmax, Feed, PlayTrace};
use crate::error::{Error, Result};
use crate::mixing::MixingProfile;
use crate::processes::PayoffMatrix;

/// Upper confidence index. `s ≥ 1` is the number of selections of the arm,
/// `t ≥ 1` the global round at which the selection is made.
pub fn ucb_index(mean: f64, s: u32, t: usize, profile: &MixingProfile) -> f64 {
    debug_assert!(s >= 1 && t >= 1);
    let batch = 2f64.powi(s as i32);
    let theta = profile.sum_bound();
    mean + (8.0 * profile.xi() * (0.125 + (t as f64).ln()) / batch).sqrt() + 2.0 * theta / batch
}

/// One selected batch: `len` rounds of `arm` starting at round `start`
/// (1-based). `len < 2^s` only when cut by the horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Batch {
    pub arm: usize,
    pub start: usize,
    pub len: usize,
    /// Selection count `s` the batch length was derived from.
    pub selection: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcbState {
    /// Next round to be played (1-based).
    pub t: usize,
    pub selections: Vec<u32>,
    pub means: Vec<f64>,
    pub plays: Vec<usize>,
    /// Initial single pulls are not listed; only selected batches.
    pub batches: Vec<Batch>,
}

impl UcbState {
    fn initialise(feed: &mut Feed<'_>) -> Self {
        let k = feed.arms();
        let mut means = vec![0.0; k];
        for (arm, mean) in means.iter_mut().enumerate() {
            *mean = feed.pull(arm).expect("horizon covers initialisation");
        }
        Self {
            t: k + 1,
            selections: vec![1; k],
            means,
            plays: vec![1; k],
            batches: Vec::new(),
        }
    }

    fn select(&self, profile: &MixingProfile) -> usize {
        min_argmax(
            self.means
                .iter()
                .zip(&self.selections)
                .map(|(&m, &s)| ucb_index(m, s, self.t, profile)),
        )
    }
}

/// Runs the batched UCB policy for `n` rounds and returns the trace with the
/// final state.
pub fn run_phi_ucb_with_state(env: &PayoffMatrix, profile: &MixingProfile, n: usize) -> Result<(PlayTrace, UcbState)> {
    let k = env.arms();
    if n < k {
        return Err(Error::config(format!(
            "horizon {n} is shorter than the {k} initial pulls"
        )));
    }
    let mut feed = Feed::new(env, n)?;
    let mut state = UcbState::initialise(&mut feed);
    while feed.remaining() > 0 {
        let arm = state.select(profile);
        let s = state.selections[arm];
        let len = (1usize << s.min(62)).min(feed.remaining());
        let start = state.t;
        let sum: f64 = (0..len).map(|_| feed.pull(arm).expect("batch fits the horizon")).sum();
        state.means[arm] = sum / len as f64;
        state.selections[arm] += 1;
        state.plays[arm] += len;
        state.t += len;
        state.batches.push(Batch {
            arm,
            start,
            len,
            selection: s,
        });
    }
    Ok((feed.into_trace(), state))
}

pub fn run_phi_ucb(env: &PayoffMatrix, profile: &MixingProfile, n: usize) -> Result<PlayTrace> {
    run_phi_ucb_with_state(env, profile, n).map(|(trace, _)| trace)
}
