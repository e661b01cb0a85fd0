use crate::error::{Error, Result};

/// Closed-form bound `φ_ℓ ≤ |1 − 2ε|^ℓ` for the symmetric two-state chain
/// with flip probability `ε`.
pub fn markov_phi_bound(epsilon: f64, gap: usize) -> f64 {
    (1.0 - 2.0 * epsilon).abs().powi(gap as i32).clamp(0.0, 1.0)
}

/// `Σ_{ℓ ≥ 1} |1 − 2ε|^ℓ`, i.e. `(1 − 2ε)/(2ε)` for `ε ≤ 1/2`.
pub fn phi_sum_bound(epsilon: f64) -> f64 {
    let ratio = (1.0 - 2.0 * epsilon).abs();
    if ratio == 0.0 {
        0.0
    } else {
        ratio / (1.0 - ratio)
    }
}

/// Per-gap mixing coefficients (or upper bounds) together with an upper
/// bound `ϑ` on their full sum, which is all the batched UCB index needs.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingProfile {
    phis: Vec<f64>,
    sum_bound: f64,
    xi: f64,
}

impl MixingProfile {
    /// Profile carrying only the sum bound `ϑ`.
    pub fn from_sum_bound(theta: f64) -> Result<Self> {
        Self::new(Vec::new(), theta)
    }

    /// `phis[ℓ − 1]` is the coefficient at gap `ℓ`.
    pub fn new(phis: Vec<f64>, sum_bound: f64) -> Result<Self> {
        if !sum_bound.is_finite() || sum_bound < 0.0 {
            return Err(Error::spec(format!(
                "sum bound must be finite and non-negative, got {sum_bound}"
            )));
        }
        if phis.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::spec("mixing coefficients must lie in [0,1]"));
        }
        if let Some(w) = phis.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::spec(format!(
                "mixing coefficients increase between gaps {} and {}",
                w + 1,
                w + 2
            )));
        }
        let stored: f64 = phis.iter().sum();
        if stored > sum_bound + 1e-12 {
            return Err(Error::spec(format!(
                "sum bound {sum_bound} is below the stored coefficients' sum {stored}"
            )));
        }
        Ok(Self {
            phis,
            sum_bound,
            xi: 1.0 + 8.0 * sum_bound,
        })
    }

    /// Closed-form profile of the two-state chain, storing gaps `1..=gaps`.
    pub fn two_state(epsilon: f64, gaps: usize) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::spec(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        let phis = (1..=gaps).map(|l| markov_phi_bound(epsilon, l)).collect();
        Self::new(phis, phi_sum_bound(epsilon))
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Coefficient at `gap`; gap 0 is taken as 1 (maximal dependence).
    /// Returns `None` beyond the stored range.
    pub fn phi(&self, gap: usize) -> Option<f64> {
        match gap {
            0 => Some(1.0),
            g => self.phis.get(g - 1).copied(),
        }
    }

    /// `ϑ ≥ Σ_{ℓ≥1} φ_ℓ`.
    pub fn sum_bound(&self) -> f64 {
        self.sum_bound
    }

    /// `ξ = 1 + 8ϑ`.
    pub fn xi(&self) -> f64 {
        self.xi
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn closed_form_examples() {
        assert_eq!(markov_phi_bound(0.5, 1), 0.0);
        assert_eq!(markov_phi_bound(0.5, 7), 0.0);
        assert_abs_diff_eq!(markov_phi_bound(0.1, 1), 0.8, epsilon = 1e-15);
        assert_abs_diff_eq!(markov_phi_bound(0.1, 2), 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_sum_bound(0.25), 1.0, epsilon = 1e-15);
        assert_eq!(phi_sum_bound(0.5), 0.0);
        assert_abs_diff_eq!(phi_sum_bound(0.1), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn sum_matches_partial_sums() {
        for eps in [0.05, 0.1, 0.3, 0.45, 0.7] {
            let partial: f64 = (1..=4000).map(|l| markov_phi_bound(eps, l)).sum();
            assert_abs_diff_eq!(partial, phi_sum_bound(eps), epsilon = 1e-9);
        }
    }

    #[test]
    fn profile_invariants() {
        let p = MixingProfile::two_state(0.1, 6).unwrap();
        assert_eq!(p.xi(), 1.0 + 8.0 * p.sum_bound());
        assert_abs_diff_eq!(p.sum_bound(), 4.0, epsilon = 1e-14);
        assert_eq!(p.phi(0), Some(1.0));
        assert_abs_diff_eq!(p.phi(2).unwrap(), 0.64, epsilon = 1e-15);
        assert_eq!(p.phi(7), None);
        assert!(p.phis().windows(2).all(|w| w[1] <= w[0]));

        assert!(MixingProfile::new(vec![0.2, 0.3], 1.0).is_err());
        assert!(MixingProfile::new(vec![0.5, 0.3], 0.5).is_err());
        assert!(MixingProfile::new(vec![1.5], 2.0).is_err());
        assert!(MixingProfile::from_sum_bound(-1.0).is_err());
        assert_eq!(MixingProfile::from_sum_bound(0.0).unwrap().xi(), 1.0);
    }
}
