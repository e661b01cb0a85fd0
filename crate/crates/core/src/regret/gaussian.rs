//! Plus-part expectations of a Gaussian difference.

use libm::erfc;
use rand_distr::{Distribution, StandardNormal};

use super::{Estimate, Moments};
use crate::error::{Error, Result};
use crate::rng;

/// Standard normal density.
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal distribution function via the complementary error
/// function (musl port, accurate to a few ulp).
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `X − Y ~ N(Δ, σ²)` evaluated at `z = Δ/σ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianTailTerms {
    pub delta: f64,
    pub sigma: f64,
    pub phi_density: f64,
    pub phi_cdf: f64,
}

impl GaussianTailTerms {
    pub fn new(delta: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::spec(format!("sigma must be positive, got {sigma}")));
        }
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::spec(format!("delta must be non-negative, got {delta}")));
        }
        let z = delta / sigma;
        Ok(Self {
            delta,
            sigma,
            phi_density: std_normal_pdf(z),
            phi_cdf: std_normal_cdf(z),
        })
    }

    /// `E(X − Y)^+ = ΔΦ(Δ/σ) + σφ(Δ/σ)`.
    pub fn upper_plus(&self) -> f64 {
        self.delta * self.phi_cdf + self.sigma * self.phi_density
    }

    /// `E(Y − X)^+ = E(X − Y)^+ − Δ = σφ(Δ/σ) − ΔΦ(−Δ/σ)`, evaluated in the
    /// second form to avoid cancellation for large `Δ/σ`.
    pub fn lower_plus(&self) -> f64 {
        self.sigma * self.phi_density - self.delta * std_normal_cdf(-self.delta / self.sigma)
    }
}

/// Closed forms and the four inequalities
/// `0 ≤ E(Y−X)^+ ≤ σφ(Δ/σ)` and `Δ ≤ E(X−Y)^+ ≤ σφ(Δ/σ) + Δ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianPlusReport {
    pub terms: GaussianTailTerms,
    pub upper_plus: f64,
    pub lower_plus: f64,
    /// Slack of each inequality in the order listed above; negative means
    /// violated.
    pub margins: [f64; 4],
    pub min_margin: f64,
}

impl GaussianPlusReport {
    pub fn passes(&self, tolerance: f64) -> bool {
        self.min_margin >= -tolerance
    }
}

pub fn gaussian_plus_bounds(delta: f64, sigma: f64) -> Result<GaussianPlusReport> {
    let terms = GaussianTailTerms::new(delta, sigma)?;
    let upper_plus = terms.upper_plus();
    let lower_plus = terms.lower_plus();
    let cap = sigma * terms.phi_density;
    let margins = [
        lower_plus,
        cap - lower_plus,
        upper_plus - delta,
        cap + delta - upper_plus,
    ];
    Ok(GaussianPlusReport {
        terms,
        upper_plus,
        lower_plus,
        margins,
        min_margin: margins.iter().copied().fold(f64::INFINITY, f64::min),
    })
}

/// Simulated `E(X − Y)^+` from `draws` samples of `N(Δ, σ²)`.
pub fn plus_part_monte_carlo(delta: f64, sigma: f64, draws: usize, seed: u64) -> Result<Estimate> {
    GaussianTailTerms::new(delta, sigma)?;
    let mut rng = rng::stream(seed, &[]);
    let m: Moments = (0..draws)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            (delta + sigma * z).max(0.0)
        })
        .collect();
    m.estimate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn cdf_reference_values() {
        assert_abs_diff_eq!(std_normal_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(std_normal_cdf(2.0), 0.9772498680518208, epsilon = 1e-15);
        assert_abs_diff_eq!(std_normal_cdf(-1.0), 0.15865525393145707, epsilon = 1e-15);
        assert_abs_diff_eq!(std_normal_pdf(0.0), 0.3989422804014327, epsilon = 1e-15);
    }

    #[test]
    fn symmetric_case_is_tight() {
        let r = gaussian_plus_bounds(0.0, 2f64.sqrt()).unwrap();
        assert_abs_diff_eq!(
            r.lower_plus,
            2f64.sqrt() / (2.0 * std::f64::consts::PI).sqrt(),
            epsilon = 1e-15
        );
        // √2·φ(0) = 1/√π
        assert_abs_diff_eq!(r.lower_plus, 0.5641895835477563, epsilon = 1e-12);
        assert_abs_diff_eq!(r.margins[1], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn shifted_case() {
        let r = gaussian_plus_bounds(2.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            r.upper_plus,
            2.0 * std_normal_cdf(2.0) + std_normal_pdf(2.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(r.upper_plus, 2.00849, epsilon = 1e-5);
        assert!(r.passes(1e-12));
    }

    #[test]
    fn rejects_bad_sigma() {
        assert!(gaussian_plus_bounds(1.0, 0.0).is_err());
        assert!(gaussian_plus_bounds(-1.0, 1.0).is_err());
    }
}
