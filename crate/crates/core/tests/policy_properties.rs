use mixbandit::exec::Execution;
use mixbandit::mixing::{phi_dependence, ChainLaw, MixingProfile};
use mixbandit::policies::{
    baseline_classic_ucb, baseline_hindsight, brute_force_vstar, example1_trace, gp_m_star, run_gp_switching,
    run_phi_ucb, run_phi_ucb_with_state, vstar_dynamic_programming, Adjustment, Example1Params, VSTAR_DEFAULT_GUARD,
};
use mixbandit::processes::{MarkovArmSpec, PayoffMatrix};
use mixbandit::regret::{monte_carlo, prop3_gap_bound, Environment, Experiment, PolicyKind};
use proptest::prelude::*;

fn matrix(max_arms: usize, max_n: usize) -> impl Strategy<Value = PayoffMatrix> {
    (1..=max_arms, 1..=max_n).prop_flat_map(|(k, n)| {
        prop::collection::vec(
            prop::collection::vec(prop::sample::select(vec![0.0, 0.25, 0.5, 1.0]), k),
            n,
        )
        .prop_map(|rows| PayoffMatrix::from_rows(&rows).unwrap())
    })
}

fn two_state() -> impl Strategy<Value = MarkovArmSpec> {
    (0.05f64..0.95, prop::bool::ANY).prop_map(|(eps, flip)| {
        let payoffs = if flip { [0.0, 1.0] } else { [1.0, 0.0] };
        MarkovArmSpec::two_state(eps, payoffs).unwrap()
    })
}

proptest! {
    #[test]
    fn every_policy_plays_one_arm_per_round(env in matrix(4, 60), theta in 0.0f64..5.0) {
        let (n, k) = (env.horizon(), env.arms());
        let mut traces = vec![baseline_hindsight(&env, n).unwrap()];
        if n >= k {
            traces.push(run_phi_ucb(&env, &MixingProfile::from_sum_bound(theta).unwrap(), n).unwrap());
            traces.push(baseline_classic_ucb(&env, n).unwrap());
        }
        let gp = gp_m_star(0.5, 1.0, 1.0, k, Adjustment::Off).unwrap();
        if n >= gp.m_star {
            traces.push(run_gp_switching(&env, &gp, n).unwrap().trace);
        }
        if k == 2 {
            traces.push(example1_trace(&env, &Example1Params::new(0.1, 0.05).unwrap(), n).unwrap());
        }
        for t in &traces {
            prop_assert_eq!(t.len(), n);
            prop_assert_eq!(t.counts(k).iter().sum::<usize>(), n);
            for (round, (&arm, &x)) in t.arms.iter().zip(&t.payoffs).enumerate() {
                prop_assert_eq!(env.get(round, arm), x);
            }
        }
    }

    #[test]
    fn ucb_batches_double(env in matrix(3, 200)) {
        prop_assume!(env.horizon() >= env.arms());
        let profile = MixingProfile::from_sum_bound(1.0).unwrap();
        let (_, state) = run_phi_ucb_with_state(&env, &profile, env.horizon()).unwrap();
        let mut seen = vec![0u32; env.arms()];
        for b in &state.batches {
            seen[b.arm] += 1;
            prop_assert_eq!(b.selection, seen[b.arm]);
            let full = 1usize << b.selection;
            prop_assert!(b.len == full || b.start + b.len - 1 == env.horizon());
        }
    }

    #[test]
    fn one_round_optimum_is_best_mean(a in two_state(), b in two_state(), c in 0.0f64..1.0) {
        let specs = [a, b, MarkovArmSpec::constant(c).unwrap()];
        let best = specs.iter().map(MarkovArmSpec::stationary_mean).fold(f64::NEG_INFINITY, f64::max);
        let v = brute_force_vstar(&specs, 1, VSTAR_DEFAULT_GUARD).unwrap();
        prop_assert!((v.value - best).abs() < 1e-12);
    }

    #[test]
    fn enumeration_matches_backward_induction(a in two_state(), b in two_state(), n in 1usize..=3) {
        let specs = [a, b];
        let enumerated = brute_force_vstar(&specs, n, VSTAR_DEFAULT_GUARD).unwrap().value;
        let dp = vstar_dynamic_programming(&specs, n).unwrap();
        prop_assert!((enumerated - dp).abs() < 1e-12);
    }

    #[test]
    fn optimum_exceeds_best_arm_by_at_most_two_n_phi_one(a in two_state(), b in two_state(), n in 1usize..=3) {
        let specs = [a, b];
        let mu_star = specs.iter().map(MarkovArmSpec::stationary_mean).fold(f64::NEG_INFINITY, f64::max);
        let joint = ChainLaw::product(&specs.iter().map(ChainLaw::from).collect::<Vec<_>>()).unwrap();
        let phi_1 = phi_dependence(&joint.pair_distribution(1).unwrap()).unwrap();
        let v = brute_force_vstar(&specs, n, VSTAR_DEFAULT_GUARD).unwrap().value;
        prop_assert!(v >= n as f64 * mu_star - 1e-12);
        prop_assert!(v - n as f64 * mu_star <= prop3_gap_bound(n, phi_1) + 1e-9);
    }
}

#[test]
fn frozen_matrix_replays_identically() {
    let rows: Vec<Vec<f64>> = (0..64)
        .map(|t| vec![((t * 7) % 5) as f64 / 4.0, ((t * 3) % 4) as f64 / 3.0])
        .collect();
    let env = PayoffMatrix::from_rows(&rows).unwrap();
    let profile = MixingProfile::from_sum_bound(0.5).unwrap();
    assert_eq!(
        run_phi_ucb(&env, &profile, 64).unwrap(),
        run_phi_ucb(&env, &profile, 64).unwrap()
    );
    let gp = gp_m_star(1.0, 0.5, 1.0, 2, Adjustment::Off).unwrap();
    assert_eq!(
        run_gp_switching(&env, &gp, 64).unwrap(),
        run_gp_switching(&env, &gp, 64).unwrap()
    );
}

#[test]
fn classic_ucb_rarely_plays_the_bad_arm() {
    let exp = Experiment {
        name: "classic".into(),
        environment: Environment::Markov(vec![
            MarkovArmSpec::bernoulli(0.9).unwrap(),
            MarkovArmSpec::bernoulli(0.1).unwrap(),
        ]),
        policy: PolicyKind::ClassicUcb,
        horizon: 1000,
        bounds: vec![],
    };
    let r = monte_carlo(&exp, 100, 31, Execution::Parallel, 0).unwrap();
    assert!(r.mean_counts[1] < 100.0, "mean T_2 = {}", r.mean_counts[1]);
}
