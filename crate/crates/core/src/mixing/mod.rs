//! Exact dependence coefficients on finite spaces and closed-form mixing
//! bounds.
//!
//! The φ-dependence between two finite σ-algebras is
//! `sup_{U, V} |P(V) − P(V | U)|` over left events `U` with `P(U) > 0` and
//! right events `V`. For a fixed `U` the supremum over `V` is attained at
//! the event where the conditional law exceeds the marginal, so it equals
//! the total-variation distance between `P(·)` and `P(· | U)` on the right
//! atoms. Only left events are enumerated: `O(2^a · b)` instead of
//! `O(2^a · 2^b)`.
//!
//! ψ-dependence has no such collapse and is computed by enumerating both
//! event lattices.

mod chain;
mod profile;

pub use chain::ChainLaw;
pub use profile::{markov_phi_bound, phi_sum_bound, MixingProfile};

use crate::error::{Error, Result};

/// Largest left σ-algebra (in atoms) accepted by [`phi_dependence`].
pub const PHI_MAX_LEFT: usize = 20;
/// Largest side (in atoms) accepted by [`psi_dependence`].
pub const PSI_MAX_SIDE: usize = 12;

const SUM_TOL: f64 = 1e-12;

/// Joint law of two finite random elements, listed on the full product of
/// their atoms (zeros allowed).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteJointDistribution {
    left_size: usize,
    right_size: usize,
    // row-major: probs[l * right_size + r]
    probs: Vec<f64>,
}

impl FiniteJointDistribution {
    pub fn new(left_size: usize, right_size: usize, probs: Vec<f64>) -> Result<Self> {
        if left_size == 0 || right_size == 0 {
            return Err(Error::spec("both sides need at least one atom"));
        }
        if probs.len() != left_size * right_size {
            return Err(Error::spec(format!(
                "{} probabilities listed for a {left_size}×{right_size} product",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::spec("probabilities must be finite and non-negative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOL {
            return Err(Error::spec(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Self {
            left_size,
            right_size,
            probs,
        })
    }

    /// Builds from `(left, right, probability)` atoms; every product cell must
    /// be listed exactly once.
    pub fn from_atoms(left_size: usize, right_size: usize, atoms: &[(usize, usize, f64)]) -> Result<Self> {
        if atoms.len() != left_size * right_size {
            return Err(Error::spec(format!(
                "{} atoms listed, full product support needs {}",
                atoms.len(),
                left_size * right_size
            )));
        }
        let mut probs = vec![f64::NAN; left_size * right_size];
        for &(l, r, p) in atoms {
            if l >= left_size || r >= right_size {
                return Err(Error::spec(format!(
                    "atom ({l}, {r}) is outside the {left_size}×{right_size} grid"
                )));
            }
            let cell = &mut probs[l * right_size + r];
            if !cell.is_nan() {
                return Err(Error::spec(format!("atom ({l}, {r}) listed twice")));
            }
            *cell = p;
        }
        Self::new(left_size, right_size, probs)
    }

    /// Law of two independent random elements.
    pub fn independent(left: &[f64], right: &[f64]) -> Result<Self> {
        let probs = left.iter().flat_map(|&a| right.iter().map(move |&b| a * b)).collect();
        Self::new(left.len(), right.len(), probs)
    }

    pub fn left_size(&self) -> usize {
        self.left_size
    }

    pub fn right_size(&self) -> usize {
        self.right_size
    }

    #[inline]
    pub fn prob(&self, left: usize, right: usize) -> f64 {
        self.probs[left * self.right_size + right]
    }

    pub fn left_marginal(&self) -> Vec<f64> {
        self.probs.chunks(self.right_size).map(|row| row.iter().sum()).collect()
    }

    pub fn right_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.right_size];
        for row in self.probs.chunks(self.right_size) {
            for (acc, p) in m.iter_mut().zip(row) {
                *acc += p;
            }
        }
        m
    }

    /// Joint law of two independent pairs: left atoms are `(l1, l2)` and
    /// right atoms `(r1, r2)`, both encoded as `x1 * size2 + x2`.
    pub fn independent_product(&self, other: &Self) -> Result<Self> {
        let (ls, rs) = (self.left_size * other.left_size, self.right_size * other.right_size);
        let mut probs = vec![0.0; ls * rs];
        for l1 in 0..self.left_size {
            for l2 in 0..other.left_size {
                for r1 in 0..self.right_size {
                    for r2 in 0..other.right_size {
                        let l = l1 * other.left_size + l2;
                        let r = r1 * other.right_size + r2;
                        probs[l * rs + r] = self.prob(l1, r1) * other.prob(l2, r2);
                    }
                }
            }
        }
        Self::new(ls, rs, probs)
    }

    /// Merges right atoms that share a label, i.e. the joint law of the left
    /// element and `label(right)`. Labels are compared exactly.
    pub fn coarsen_right(&self, labels: &[f64]) -> Result<(Self, Vec<f64>)> {
        if labels.len() != self.right_size {
            return Err(Error::Shape(format!(
                "{} labels for {} right atoms",
                labels.len(),
                self.right_size
            )));
        }
        let mut distinct: Vec<f64> = Vec::new();
        let index: Vec<usize> = labels
            .iter()
            .map(|&v| match distinct.iter().position(|&d| d == v) {
                Some(i) => i,
                None => {
                    distinct.push(v);
                    distinct.len() - 1
                }
            })
            .collect();
        let rs = distinct.len();
        let mut probs = vec![0.0; self.left_size * rs];
        for l in 0..self.left_size {
            for r in 0..self.right_size {
                probs[l * rs + index[r]] += self.prob(l, r);
            }
        }
        // summation order can leave the total a few ulps from 1
        Ok((Self::new(self.left_size, rs, probs)?, distinct))
    }
}

fn guard(what: &'static str, atoms: usize, limit: usize) -> Result<()> {
    if atoms > limit {
        Err(Error::Capacity {
            what,
            required: atoms as u128,
            limit: limit as u128,
        })
    } else {
        Ok(())
    }
}

/// Row sums of `P(U ∩ {right = r})` for every left event `U`, indexed by bit
/// mask. Built incrementally from the mask with its lowest bit cleared.
fn left_event_rows(dist: &FiniteJointDistribution) -> Vec<Vec<f64>> {
    let (a, b) = (dist.left_size, dist.right_size);
    let mut rows = vec![vec![0.0; b]; 1 << a];
    for mask in 1usize..(1 << a) {
        let low = mask.trailing_zeros() as usize;
        let (done, cur) = rows.split_at_mut(mask);
        let base = &done[mask & (mask - 1)];
        for r in 0..b {
            cur[0][r] = base[r] + dist.prob(low, r);
        }
    }
    rows
}

/// Exact φ-dependence between the left and right σ-algebras.
pub fn phi_dependence(dist: &FiniteJointDistribution) -> Result<f64> {
    guard("phi_dependence left atoms", dist.left_size, PHI_MAX_LEFT)?;
    let marginal = dist.right_marginal();
    let b = dist.right_size;
    let mut worst: f64 = 0.0;
    let mut joint = vec![0.0; b];
    for mask in 1usize..(1 << dist.left_size) {
        joint.iter_mut().for_each(|x| *x = 0.0);
        let mut bits = mask;
        while bits != 0 {
            let l = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for (acc, r) in joint.iter_mut().zip(0..b) {
                *acc += dist.prob(l, r);
            }
        }
        let pu: f64 = joint.iter().sum();
        if pu <= 0.0 {
            continue;
        }
        let tv = 0.5
            * joint
                .iter()
                .zip(&marginal)
                .map(|(j, m)| (m - j / pu).abs())
                .sum::<f64>();
        worst = worst.max(tv);
    }
    Ok(worst.min(1.0))
}

/// Exact ψ-dependence: `sup |1 − P(U∩V) / (P(U)P(V))|` over event pairs with
/// positive marginals.
pub fn psi_dependence(dist: &FiniteJointDistribution) -> Result<f64> {
    guard("psi_dependence left atoms", dist.left_size, PSI_MAX_SIDE)?;
    guard("psi_dependence right atoms", dist.right_size, PSI_MAX_SIDE)?;
    let rows = left_event_rows(dist);
    let b = dist.right_size;
    let right_marginal = dist.right_marginal();
    let mut pv = vec![0.0; 1 << b];
    for v in 1usize..(1 << b) {
        pv[v] = pv[v & (v - 1)] + right_marginal[v.trailing_zeros() as usize];
    }
    let mut worst: f64 = 0.0;
    let mut inter = vec![0.0; 1 << b];
    for row in rows.iter().skip(1) {
        let pu: f64 = row.iter().sum();
        if pu <= 0.0 {
            continue;
        }
        for v in 1usize..(1 << b) {
            inter[v] = inter[v & (v - 1)] + row[v.trailing_zeros() as usize];
            if pv[v] > 0.0 {
                worst = worst.max((1.0 - inter[v] / (pu * pv[v])).abs());
            }
        }
    }
    Ok(worst)
}

/// Outcome of checking `∫_B |E(X|G) − EX| dP ≤ 2 P(B) ‖X‖_∞ φ(G, σ(X))`
/// for every left event `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct BradleyReport {
    /// `φ(G, σ(X))`, computed on the law of (left atom, X).
    pub phi: f64,
    pub sup_norm: f64,
    /// Left event (bit mask over left atoms) with the smallest `rhs − lhs`.
    pub worst_event: usize,
    pub worst_lhs: f64,
    pub worst_rhs: f64,
    /// `min_B (rhs − lhs)`.
    pub worst_margin: f64,
    pub events_checked: usize,
    pub pass: bool,
}

/// Checks the conditional-expectation inequality for `X = payoff(right atom)`
/// against the left σ-algebra.
pub fn bradley_check(dist: &FiniteJointDistribution, payoff: &[f64]) -> Result<BradleyReport> {
    guard("bradley_check left atoms", dist.left_size, PHI_MAX_LEFT)?;
    let (coarse, values) = dist.coarsen_right(payoff)?;
    let phi = phi_dependence(&coarse)?;
    let sup_norm = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mean: f64 = coarse.right_marginal().iter().zip(&values).map(|(p, v)| p * v).sum();
    let left = coarse.left_marginal();
    // per-atom contribution P(G=l)·|E(X|G=l) − EX| and mass P(G=l)
    let contrib: Vec<f64> = (0..coarse.left_size)
        .map(|l| {
            if left[l] <= 0.0 {
                return 0.0;
            }
            let cond: f64 = (0..coarse.right_size)
                .map(|r| coarse.prob(l, r) * values[r])
                .sum::<f64>()
                / left[l];
            left[l] * (cond - mean).abs()
        })
        .collect();
    let mut report = BradleyReport {
        phi,
        sup_norm,
        worst_event: 0,
        worst_lhs: 0.0,
        worst_rhs: 0.0,
        worst_margin: f64::INFINITY,
        events_checked: 0,
        pass: true,
    };
    for mask in 1usize..(1 << coarse.left_size) {
        let (mut lhs, mut pb) = (0.0, 0.0);
        for l in (0..coarse.left_size).filter(|l| mask & (1 << l) != 0) {
            lhs += contrib[l];
            pb += left[l];
        }
        let rhs = 2.0 * pb * sup_norm * phi;
        let margin = rhs - lhs;
        report.events_checked += 1;
        if margin < report.worst_margin {
            report.worst_margin = margin;
            report.worst_event = mask;
            report.worst_lhs = lhs;
            report.worst_rhs = rhs;
        }
    }
    report.pass = report.worst_margin >= -1e-12;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn fair_coin_pair() -> FiniteJointDistribution {
        FiniteJointDistribution::independent(&[0.5, 0.5], &[0.5, 0.5]).unwrap()
    }

    fn identical_coin() -> FiniteJointDistribution {
        FiniteJointDistribution::new(2, 2, vec![0.5, 0.0, 0.0, 0.5]).unwrap()
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_dependence(&fair_coin_pair()).unwrap(), 0.0);
        assert_abs_diff_eq!(phi_dependence(&identical_coin()).unwrap(), 0.5, epsilon = 1e-15);
        let chain = ChainLaw::two_state(0.1).unwrap().pair_distribution(1).unwrap();
        assert_abs_diff_eq!(phi_dependence(&chain).unwrap(), 0.4, epsilon = 1e-12);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi_dependence(&fair_coin_pair()).unwrap(), 0.0);
        let chain = ChainLaw::two_state(0.1).unwrap().pair_distribution(1).unwrap();
        assert_abs_diff_eq!(psi_dependence(&chain).unwrap(), 0.8, epsilon = 1e-12);
        // identical coins: P(U∩V)/(P(U)P(V)) = 0.5/0.25 on the diagonal
        assert_abs_diff_eq!(psi_dependence(&identical_coin()).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn capacity_guards() {
        let big = FiniteJointDistribution::independent(&[1.0 / 21.0; 21], &[1.0]).unwrap();
        assert!(matches!(
            phi_dependence(&big),
            Err(Error::Capacity {
                required: 21,
                limit: 20,
                ..
            })
        ));
        let wide = FiniteJointDistribution::independent(&[1.0], &[1.0 / 13.0; 13]).unwrap();
        assert!(matches!(
            psi_dependence(&wide),
            Err(Error::Capacity { required: 13, .. })
        ));
    }

    #[test]
    fn atoms_must_cover_the_product() {
        assert!(FiniteJointDistribution::from_atoms(2, 2, &[(0, 0, 0.5), (1, 1, 0.5)]).is_err());
        assert!(FiniteJointDistribution::from_atoms(2, 1, &[(0, 0, 0.5), (0, 0, 0.5)]).is_err());
        let d = FiniteJointDistribution::from_atoms(2, 1, &[(1, 0, 0.25), (0, 0, 0.75)]).unwrap();
        assert_eq!(d.left_marginal(), vec![0.75, 0.25]);
        assert!(FiniteJointDistribution::new(1, 2, vec![0.5, 0.6]).is_err());
        assert!(FiniteJointDistribution::new(1, 2, vec![1.5, -0.5]).is_err());
    }

    #[test]
    fn zero_mass_left_events_are_skipped() {
        let d = FiniteJointDistribution::new(3, 2, vec![0.5, 0.0, 0.0, 0.5, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(phi_dependence(&d).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn bradley_on_independent_sides_is_flat() {
        let report = bradley_check(&fair_coin_pair(), &[1.0, 0.0]).unwrap();
        assert_eq!(report.worst_lhs, 0.0);
        assert_eq!(report.phi, 0.0);
        assert!(report.pass);
        assert_eq!(report.events_checked, 3);
    }

    #[test]
    fn bradley_on_chain_pair() {
        let d = ChainLaw::two_state(0.1).unwrap().pair_distribution(1).unwrap();
        let report = bradley_check(&d, &[1.0, 0.0]).unwrap();
        assert!(report.pass);
        assert_abs_diff_eq!(report.phi, 0.4, epsilon = 1e-12);
        // B = {X_1 = state 0}: P(B)·|E(X|B) − EX| = 0.5·|0.9 − 0.5|, rhs = 2·0.5·1·0.4
        let b = 0b01;
        let lhs: f64 = 0.5 * (0.9f64 - 0.5).abs();
        assert_abs_diff_eq!(lhs, 0.2, epsilon = 1e-15);
        let rhs = 2.0 * 0.5 * 1.0 * 0.4;
        assert!(report.worst_margin <= rhs - lhs + 1e-12);
        let full = bradley_check(&d, &[1.0, 0.0]).unwrap();
        assert!(full.worst_event == b || full.worst_event == 0b10 || full.worst_event == 0b11);
    }

    #[test]
    fn coarsening_merges_equal_labels() {
        let d = FiniteJointDistribution::new(1, 3, vec![0.2, 0.3, 0.5]).unwrap();
        let (c, values) = d.coarsen_right(&[1.0, 0.0, 1.0]).unwrap();
        assert_eq!(values, vec![1.0, 0.0]);
        assert_abs_diff_eq!(c.prob(0, 0), 0.7, epsilon = 1e-15);
    }
}
