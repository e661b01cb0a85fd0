//! Comparison policies.

use super::{min_argmax, Feed, PlayTrace};
use crate::error::{Error, Result};
use crate::processes::PayoffMatrix;

/// Plays the arm with the largest stationary mean every round.
pub fn baseline_best_arm(env: &PayoffMatrix, means: &[f64], n: usize) -> Result<PlayTrace> {
    if means.len() != env.arms() {
        return Err(Error::Shape(format!("{} means for {} arms", means.len(), env.arms())));
    }
    let best = min_argmax(means.iter().copied());
    let mut feed = Feed::new(env, n)?;
    while feed.pull(best).is_some() {}
    Ok(feed.into_trace())
}

/// Unbatched UCB index `X̄_u + sqrt(2 ln t / T_u)`.
pub fn classic_ucb_index(mean: f64, plays: usize, t: usize) -> f64 {
    mean + (2.0 * (t as f64).ln() / plays as f64).sqrt()
}

/// Standard UCB with running means, for ablation against the batched index.
pub fn baseline_classic_ucb(env: &PayoffMatrix, n: usize) -> Result<PlayTrace> {
    let k = env.arms();
    if n < k {
        return Err(Error::config(format!(
            "horizon {n} is shorter than the {k} initial pulls"
        )));
    }
    let mut feed = Feed::new(env, n)?;
    let mut sums = vec![0.0; k];
    let mut plays = vec![0usize; k];
    for arm in 0..k {
        sums[arm] = feed.pull(arm).expect("horizon covers initialisation");
        plays[arm] = 1;
    }
    while feed.remaining() > 0 {
        let t = feed.round();
        let arm = min_argmax((0..k).map(|u| classic_ucb_index(sums[u] / plays[u] as f64, plays[u], t)));
        sums[arm] += feed.pull(arm).expect("remaining > 0");
        plays[arm] += 1;
    }
    Ok(feed.into_trace())
}

/// Per-round row maximum of the hidden matrix. An oracle, not a policy: it
/// reads the full matrix.
pub fn baseline_hindsight(env: &PayoffMatrix, n: usize) -> Result<PlayTrace> {
    if n > env.horizon() {
        return Err(Error::config(format!(
            "horizon {n} exceeds the {} sampled rounds",
            env.horizon()
        )));
    }
    let (arms, payoffs) = (0..n).map(|t| env.row_max(t)).unzip();
    Ok(PlayTrace { arms, payoffs })
}
