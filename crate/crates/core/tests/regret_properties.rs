use std::f64::consts::SQRT_2;

use mixbandit::cli::{run_scenario, shipped_scenario, RunOverrides, ScenarioConfig};
use mixbandit::mixing::{phi_dependence, ChainLaw};
use mixbandit::regret::{gaussian_plus_bounds, plus_part_monte_carlo, prop2_bias_bound, theorem2_bound, IID_CONSTANT};
use proptest::prelude::*;

proptest! {
    #[test]
    fn plus_part_inequalities(delta in 0.0f64..8.0, sigma in 0.05f64..5.0) {
        let r = gaussian_plus_bounds(delta, sigma).unwrap();
        prop_assert!(r.passes(1e-12), "{:?}", r);
        prop_assert!((r.upper_plus - r.lower_plus - delta).abs() < 1e-12);
    }

    #[test]
    fn theorem2_without_mixing_is_the_iid_bound(n in 2.0f64..1e7, gaps in prop::collection::vec(0.0f64..1.0, 1..6)) {
        let direct: f64 = gaps.iter().filter(|&&g| g > 0.0).map(|g| 32.0 * n.ln() / g).sum::<f64>()
            + IID_CONSTANT * gaps.iter().sum::<f64>();
        prop_assert_eq!(theorem2_bound(n, &gaps, 0.0).unwrap(), direct);
    }

    #[test]
    fn theorem2_grows_with_theta(n in 2.0f64..1e6, gap in 0.01f64..1.0, theta in 0.0f64..10.0) {
        let lo = theorem2_bound(n, &[gap], theta).unwrap();
        let hi = theorem2_bound(n, &[gap], theta + 0.5).unwrap();
        prop_assert!(hi > lo);
    }
}

#[test]
fn plus_part_grid() {
    for &delta in &[0.0, 0.25, 0.5, 1.0, 2.0, 4.0] {
        for &sigma in &[1.0, SQRT_2, 2.0] {
            let r = gaussian_plus_bounds(delta, sigma).unwrap();
            assert!(r.min_margin >= -1e-12, "({delta}, {sigma}): {}", r.min_margin);
        }
    }
}

#[test]
fn plus_part_simulation_agrees() {
    let closed = gaussian_plus_bounds(0.5, SQRT_2).unwrap().upper_plus;
    let est = plus_part_monte_carlo(0.5, SQRT_2, 1_000_000, 41).unwrap();
    assert!((est.mean - closed).abs() <= 3.0 * est.se, "{} vs {closed}", est.mean);
}

#[test]
fn bias_bound_from_the_oracle() {
    let law = ChainLaw::two_state(0.1).unwrap();
    let phi_2 = phi_dependence(&law.pair_distribution(2).unwrap()).unwrap();
    assert!((prop2_bias_bound(1.0, phi_2) - 0.64).abs() < 1e-12);
}

#[test]
fn hindsight_regret_dominates_on_gaussian_scenarios() {
    for name in ["gp_switch_strong", "gp_best_arm_strong"] {
        let text = shipped_scenario(name).unwrap();
        let mut config = ScenarioConfig::parse(text, name).unwrap();
        config.runs = 40;
        config.horizon = 400;
        let r = run_scenario(&config, text, &RunOverrides::default()).unwrap().report;
        let slack = 3.0 * r.regret_plus.combined_se(&r.regret_bar);
        assert!(r.regret_plus.mean >= r.regret_bar.mean - slack, "{name}");
    }
}
