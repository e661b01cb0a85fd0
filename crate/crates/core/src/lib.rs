//! Restless multi-armed bandits whose pay-off processes are jointly
//! φ-mixing (weak dependence) or stationary Gaussian with slowly decaying
//! covariance (strong dependence).
//!
//! The crate is organised around five modules:
//!
//! * [`processes`] generates stationary pay-off paths for finite-state
//!   Markov arms and Gaussian arms, and keeps the full pay-off matrix hidden
//!   from policies.
//! * [`mixing`] computes φ- and ψ-dependence exactly on small finite spaces
//!   and provides the closed-form mixing bounds for two-state chains.
//! * [`policies`] holds the batched UCB policy, the Gaussian switching
//!   policy, the adversarial non-mixing sampler, baselines and an exhaustive
//!   optimal-value oracle.
//! * [`regret`] accounts for regret, evaluates the closed-form bounds and
//!   runs Monte Carlo experiments.
//! * [`cli`] parses scenario files and drives experiments end to end.
//!
//! Monte Carlo runs are executed through [`exec`], which uses rayon when the
//! `parallel` feature is enabled and a plain sequential loop otherwise. Both
//! paths produce bit-identical results for a given seed.

pub mod cli;
pub mod error;
pub mod exec;
pub mod mixing;
pub mod policies;
pub mod processes;
pub mod regret;
pub mod rng;

pub use error::{Error, Result};
