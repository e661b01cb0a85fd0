//! Random-time samplers on a single restless two-state chain.
//!
//! The adversarial sampler keeps sampling arm 1 while it repeats its first
//! observation and, after a mismatch, waits `W` rounds on a zero arm so the
//! chain forgets the mismatch. The samples it collects concentrate near
//! `1/(1+2ε)` given a first observation of 1, far from the stationary mean.
//!
//! The sticky sampler uses gap `ℓ` after a 1 and `ℓ + 1` after anything else,
//! which satisfies `τ_{i+1} ≥ τ_i + ℓ` and is measurable in past samples.

use super::{Feed, PlayTrace};
use crate::error::{Error, Result};
use crate::processes::{MarkovArmSpec, PayoffMatrix};
use crate::rng::{self, Rng};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Example1Params {
    pub epsilon: f64,
    pub delta: f64,
    /// Rounds spent on the zero arm after a mismatch:
    /// `max(1, ⌈ln(2δ) / ln|1 − 2ε|⌉)`.
    pub wait: usize,
}

impl Example1Params {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::spec(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 0.5) {
            return Err(Error::spec(format!("delta must lie in (0, 1/2), got {delta}")));
        }
        let ratio = (1.0 - 2.0 * epsilon).abs();
        // ratio = 0 makes ln(ratio) = −∞ and the quotient 0
        let raw = ((2.0 * delta).ln() / ratio.ln()).ceil();
        let wait = if raw.is_finite() && raw >= 1.0 { raw as usize } else { 1 };
        Ok(Self { epsilon, delta, wait })
    }
}

/// Arm-1 samples collected at random times, with the times (1-based).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RandomTimeSample {
    pub values: Vec<f64>,
    pub times: Vec<usize>,
}

/// Plays the adversarial sampler on a two-arm matrix (arm 0 is the chain,
/// arm 1 the waiting arm) for the feed's whole horizon.
pub fn play_example1(feed: &mut Feed<'_>, params: &Example1Params) -> Result<()> {
    if feed.arms() != 2 {
        return Err(Error::config(format!(
            "example1 needs exactly two arms, got {}",
            feed.arms()
        )));
    }
    let Some(first) = feed.pull(0) else { return Ok(()) };
    let mut last = first;
    loop {
        if last != first {
            for _ in 0..params.wait {
                if feed.pull(1).is_none() {
                    return Ok(());
                }
            }
        }
        match feed.pull(0) {
            Some(x) => last = x,
            None => return Ok(()),
        }
    }
}

/// Convenience wrapper returning the trace of [`play_example1`].
pub fn example1_trace(env: &PayoffMatrix, params: &Example1Params, n: usize) -> Result<PlayTrace> {
    let mut feed = Feed::new(env, n)?;
    play_example1(&mut feed, params)?;
    Ok(feed.into_trace())
}

/// Lazily stepped chain; the state evolves every round whether or not it is
/// observed.
struct ChainCursor<'a> {
    spec: &'a MarkovArmSpec,
    state: usize,
    t: usize,
    rng: Rng,
}

impl<'a> ChainCursor<'a> {
    fn new(spec: &'a MarkovArmSpec, seed: u64) -> Self {
        let mut rng = rng::stream(seed, &[0]);
        let state = spec.sample_initial(&mut rng);
        Self { spec, state, t: 1, rng }
    }

    fn observe_at(&mut self, t: usize) -> f64 {
        debug_assert!(t >= self.t);
        while self.t < t {
            self.state = self.spec.step(self.state, &mut self.rng);
            self.t += 1;
        }
        self.spec.payoff()[self.state]
    }
}

fn require_two_state(chain: &MarkovArmSpec) -> Result<f64> {
    chain
        .epsilon()
        .ok_or_else(|| Error::spec("random-time samplers need the symmetric two-state chain"))
}

/// Collects `num_samples` arm-1 samples of the adversarial sampler on a
/// fresh path of `chain` drawn from `seed`.
pub fn run_example1_policy(
    chain: &MarkovArmSpec,
    params: &Example1Params,
    num_samples: usize,
    seed: u64,
) -> Result<RandomTimeSample> {
    require_two_state(chain)?;
    let mut cursor = ChainCursor::new(chain, seed);
    let mut out = RandomTimeSample::default();
    let mut t = 1;
    let mut first = None;
    while out.values.len() < num_samples {
        let x = cursor.observe_at(t);
        out.values.push(x);
        out.times.push(t);
        let x1 = *first.get_or_insert(x);
        t += if x == x1 { 1 } else { params.wait + 1 };
    }
    Ok(out)
}

/// Sticky sampler: `τ_1 = 1`, `τ_{i+1} = τ_i + ℓ` after a pay-off of 1 and
/// `τ_i + ℓ + 1` otherwise.
pub fn run_sticky_sampler(
    chain: &MarkovArmSpec,
    gap: usize,
    num_samples: usize,
    seed: u64,
) -> Result<RandomTimeSample> {
    if gap == 0 {
        return Err(Error::config("sticky sampler gap must be at least 1"));
    }
    let mut cursor = ChainCursor::new(chain, seed);
    let mut out = RandomTimeSample::default();
    let mut t = 1;
    while out.values.len() < num_samples {
        let x = cursor.observe_at(t);
        out.values.push(x);
        out.times.push(t);
        t += if x == 1.0 { gap } else { gap + 1 };
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wait_examples() {
        // ⌈ln 0.1 / ln 0.8⌉ = ⌈10.32⌉
        assert_eq!(Example1Params::new(0.1, 0.05).unwrap().wait, 11);
        assert_eq!(Example1Params::new(0.5, 0.05).unwrap().wait, 1);
        // ⌈ln 0.1 / ln 0.98⌉ = ⌈113.97⌉
        assert_eq!(Example1Params::new(0.01, 0.05).unwrap().wait, 114);
        assert!(Example1Params::new(0.1, 0.5).is_err());
        assert!(Example1Params::new(0.0, 0.1).is_err());
    }

    #[test]
    fn adversarial_times_follow_the_rule() {
        let chain = MarkovArmSpec::two_state(0.3, [1.0, 0.0]).unwrap();
        let params = Example1Params::new(0.3, 0.05).unwrap();
        let s = run_example1_policy(&chain, &params, 200, 17).unwrap();
        assert_eq!(s.times[0], 1);
        for i in 1..s.values.len() {
            let step = s.times[i] - s.times[i - 1];
            if s.values[i - 1] == s.values[0] {
                assert_eq!(step, 1);
            } else {
                assert_eq!(step, params.wait + 1);
            }
        }
    }

    #[test]
    fn play_on_matrix_matches_sampler_rule() {
        // arm 0 path: 1 1 0 | waits W=2 on arm 1 | 1 0 ...
        let col0 = vec![1.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0];
        let env = PayoffMatrix::from_columns(&[col0, vec![0.0; 10]]).unwrap();
        let params = Example1Params {
            epsilon: 0.2,
            delta: 0.3,
            wait: 2,
        };
        let trace = example1_trace(&env, &params, 10).unwrap();
        assert_eq!(trace.arms, vec![0, 0, 0, 1, 1, 0, 0, 1, 1, 0]);
    }

    #[test]
    fn sticky_gaps() {
        let chain = MarkovArmSpec::two_state(0.1, [1.0, 0.0]).unwrap();
        let s = run_sticky_sampler(&chain, 2, 100, 5).unwrap();
        for i in 1..s.values.len() {
            let step = s.times[i] - s.times[i - 1];
            assert_eq!(step, if s.values[i - 1] == 1.0 { 2 } else { 3 });
        }
        assert!(run_sticky_sampler(&chain, 0, 10, 5).is_err());
    }

    #[test]
    fn samplers_need_two_state_chain() {
        let params = Example1Params::new(0.1, 0.05).unwrap();
        let chain = MarkovArmSpec::bernoulli(0.5).unwrap();
        assert!(run_example1_policy(&chain, &params, 10, 1).is_err());
    }
}
