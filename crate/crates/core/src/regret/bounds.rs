//! Closed-form regret and bias bounds.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::mixing::MixingProfile;

/// `1 + 2π²/3`, the constant multiplying `Σ Δ_i` in the UCB bound.
pub const IID_CONSTANT: f64 = 1.0 + 2.0 * PI * PI / 3.0;

fn check_gaps(gaps: &[f64]) -> Result<()> {
    if gaps.iter().any(|g| !(g.is_finite() && *g >= 0.0)) {
        return Err(Error::spec("gaps must be finite and non-negative"));
    }
    Ok(())
}

/// `Σ_{Δ_i>0} 32(1+8ϑ) ln n / Δ_i + (1 + 2π²/3) Σ Δ_i + ϑ log₂ n`.
///
/// `gaps` are `μ* − μ_i`; zero gaps (optimal arms) drop out of the first sum.
/// `n` is real so the formula can be evaluated off the integers.
pub fn theorem2_bound(n: f64, gaps: &[f64], theta: f64) -> Result<f64> {
    check_gaps(gaps)?;
    if n.is_nan() || n < 1.0 {
        return Err(Error::spec(format!("horizon must be at least 1, got {n}")));
    }
    if !(theta >= 0.0 && theta.is_finite()) {
        return Err(Error::spec(format!(
            "theta must be finite and non-negative, got {theta}"
        )));
    }
    let ln_n = n.ln();
    let explore: f64 = gaps
        .iter()
        .filter(|&&g| g > 0.0)
        .map(|g| 32.0 * (1.0 + 8.0 * theta) * ln_n / g)
        .sum();
    let gap_sum: f64 = gaps.iter().sum();
    Ok(explore + IID_CONSTANT * gap_sum + theta * n.log2())
}

/// `2cφ_ℓ`: bias of gap-`ℓ` random-time sampling of a process with range `c`.
pub fn prop2_bias_bound(c: f64, phi_ell: f64) -> f64 {
    2.0 * c * phi_ell
}

/// `2nφ₁`: how far `v*_n` can exceed `nμ*`.
pub fn prop3_gap_bound(n: usize, phi_1: f64) -> f64 {
    2.0 * n as f64 * phi_1
}

/// `2ϑ/m`: bias of the mean of `m` consecutive samples.
pub fn lemma1_bias_bound(m: usize, theta: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::config("batch length must be at least 1"));
    }
    Ok(2.0 * theta / m as f64)
}

/// `Σ_{l=0}^{n} φ_l` with `φ_0 = 1`. Uses the stored coefficients when they
/// reach gap `n`, and `1 + ϑ` otherwise.
pub fn phi_total(profile: &MixingProfile, n: usize) -> f64 {
    if profile.phis().len() >= n {
        1.0 + profile.phis()[..n].iter().sum::<f64>()
    } else {
        1.0 + profile.sum_bound()
    }
}

/// `Σ_j Δ_j E T_j(n) + 2k (Σ_{l=0}^n φ_l) log₂ n`.
pub fn prop4_bound(gaps: &[f64], expected_counts: &[f64], phi_total: f64, n: usize) -> Result<f64> {
    check_gaps(gaps)?;
    if gaps.len() != expected_counts.len() {
        return Err(Error::Shape(format!(
            "{} gaps but {} expected counts",
            gaps.len(),
            expected_counts.len()
        )));
    }
    if n == 0 {
        return Err(Error::config("horizon must be at least 1"));
    }
    let k = gaps.len() as f64;
    let weighted: f64 = gaps.iter().zip(expected_counts).map(|(g, t)| g * t).sum();
    Ok(weighted + 2.0 * k * phi_total * (n as f64).log2())
}

/// Hindsight-regret bound of the Gaussian switching policy with cycle `m*`:
///
/// `(n+m*) k(k−1) [ (Δ+√2)/m* + a√c / (8π(1−b)) · (2√π − (1 − Δ√(b/4)) e^{−Δ²b/4}) ]`
///
/// with `a = 8c m*^α` and `b = c((m*−k)^α + k^α)`. Needs `b < 1`.
pub fn prop5_bound(n: usize, m_star: usize, k: usize, delta: f64, c: f64, alpha: f64) -> Result<f64> {
    if m_star <= k {
        return Err(Error::config(format!(
            "cycle length {m_star} must exceed the arm count {k}"
        )));
    }
    if !(c > 0.0 && alpha > 0.0 && alpha <= 1.0 && delta >= 0.0) {
        return Err(Error::spec("need c > 0, alpha in (0,1] and delta >= 0"));
    }
    let m = m_star as f64;
    let kf = k as f64;
    let a = 8.0 * c * m.powf(alpha);
    let b = c * ((m - kf).powf(alpha) + kf.powf(alpha));
    if b >= 1.0 {
        return Err(Error::BoundInapplicable {
            bound: "prop5",
            reason: format!("b = {b} must be below 1"),
        });
    }
    let tail = 2.0 * PI.sqrt() - (1.0 - delta * (b / 4.0).sqrt()) * (-delta * delta * b / 4.0).exp();
    let bracket = (delta + SQRT_2) / m + a * c.sqrt() / (8.0 * PI * (1.0 - b)) * tail;
    Ok((n as f64 + m) * kf * (kf - 1.0) * bracket)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::E;

    #[test]
    fn theorem2_examples() {
        assert_abs_diff_eq!(IID_CONSTANT, 7.579736267392906, epsilon = 1e-12);
        let v = theorem2_bound(E, &[0.2], 0.0).unwrap();
        assert_abs_diff_eq!(v, 160.0 + IID_CONSTANT * 0.2, epsilon = 1e-9);
        assert_abs_diff_eq!(v, 161.5159, epsilon = 1e-4);
        let v = theorem2_bound(E, &[0.5], 1.0).unwrap();
        assert_abs_diff_eq!(v, 581.2325, epsilon = 1e-4);
        assert_abs_diff_eq!(theorem2_bound(1024.0, &[0.0, 0.0], 2.0).unwrap(), 20.0, epsilon = 1e-12);
        assert!(theorem2_bound(10.0, &[-0.1], 0.0).is_err());
    }

    #[test]
    fn theorem2_reduces_to_iid() {
        for &n in &[10.0, 1e4, 3.3e7] {
            let gaps = [0.05, 0.2, 0.0, 0.7];
            let direct: f64 = [0.05, 0.2, 0.7].iter().map(|g| 32.0 * f64::ln(n) / g).sum::<f64>() + IID_CONSTANT * 0.95;
            assert_eq!(theorem2_bound(n, &gaps, 0.0).unwrap(), direct);
        }
    }

    #[test]
    fn small_bounds() {
        assert_eq!(prop2_bias_bound(1.0, 0.0), 0.0);
        assert_abs_diff_eq!(prop2_bias_bound(1.0, 0.32), 0.64, epsilon = 1e-15);
        assert_abs_diff_eq!(prop3_gap_bound(3, 0.4), 2.4, epsilon = 1e-15);
        assert_eq!(lemma1_bias_bound(8, 0.0).unwrap(), 0.0);
        assert_eq!(lemma1_bias_bound(8, 4.0).unwrap(), 1.0);
        assert_eq!(lemma1_bias_bound(1 << 10, 1.0).unwrap(), 2f64.powi(-9));
        assert!(lemma1_bias_bound(0, 1.0).is_err());
    }

    #[test]
    fn prop4_uses_phi_zero() {
        let profile = MixingProfile::two_state(0.25, 8).unwrap();
        // 1 + 0.5 + 0.25 + 0.125 + 0.0625
        assert_abs_diff_eq!(phi_total(&profile, 4), 1.9375, epsilon = 1e-15);
        assert_abs_diff_eq!(phi_total(&profile, 100), 2.0, epsilon = 1e-15);
        let v = prop4_bound(&[0.0, 0.2], &[900.0, 100.0], 2.0, 1024).unwrap();
        assert_abs_diff_eq!(v, 20.0 + 2.0 * 2.0 * 2.0 * 10.0, epsilon = 1e-12);
        assert!(prop4_bound(&[0.0], &[1.0, 2.0], 1.0, 4).is_err());
    }

    #[test]
    fn prop5_examples() {
        assert_eq!(prop5_bound(1000, 47, 1, 1.0, 0.01, 1.0).unwrap(), 0.0);
        // Δ = 0 leaves 2√π − 1 in the tail factor
        let (n, m, k, c) = (500usize, 10usize, 2usize, 0.02f64);
        let (a, b) = (8.0 * c * 10.0, c * 10.0);
        let expected =
            (n + m) as f64 * 2.0 * (SQRT_2 / 10.0 + a * c.sqrt() / (8.0 * PI * (1.0 - b)) * (2.0 * PI.sqrt() - 1.0));
        assert_abs_diff_eq!(prop5_bound(n, m, k, 0.0, c, 1.0).unwrap(), expected, epsilon = 1e-10);
        assert!(matches!(
            prop5_bound(100, 60, 2, 0.5, 0.02, 1.0),
            Err(Error::BoundInapplicable { .. })
        ));
    }

    #[test]
    fn prop5_dual_path() {
        // Same quantity with every product regrouped: a√c/(8π) = c^{3/2} m^α / π.
        let (n, m, k, delta, c, alpha) = (1000usize, 47usize, 2usize, 1.0f64, 0.01f64, 1.0f64);
        let b = c * (45f64.powf(alpha) + 2f64.powf(alpha));
        let lead = c.powf(1.5) * 47f64.powf(alpha) / PI / (1.0 - b);
        let exp_term = (-(delta.powi(2)) * b / 4.0).exp();
        let tail = 2.0 * PI.sqrt() - exp_term + delta * (b / 4.0).sqrt() * exp_term;
        let per_round = (delta + SQRT_2) / m as f64 + lead * tail;
        let expected = 2.0 * (n as f64 * per_round + m as f64 * per_round);
        let got = prop5_bound(n, m, k, delta, c, alpha).unwrap();
        assert_abs_diff_eq!(got, expected, epsilon = 1e-9 * expected);
        assert!(got > 0.0);
    }
}
