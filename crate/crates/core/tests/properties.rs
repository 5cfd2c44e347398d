use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rewardgap::features::{compute_feature_expectations, value_from_expectations};
use rewardgap::format::{parse_environment, write_environment};
use rewardgap::learning::{aggregate_runs, q_learning_run, QLearningConfig};
use rewardgap::lp::solve_lp;
use rewardgap::mdp::{action_gap, bellman_residual, evaluate_policy, optimal_policy, Mdp, Policy, RewardVector};
use rewardgap::random_search::sample_and_filter;
use rewardgap::synthesis::build_lp;
use rewardgap::{chain, russell_norvig_grid, ChainVariant};

#[derive(Debug, Clone)]
struct Case {
    mdp: Mdp,
    policy: Policy,
    reward: Vec<f64>,
    gamma: f64,
}

fn random_mdp() -> impl Strategy<Value = Case> {
    (2usize..7, 2usize..4, 1usize..4, 0.0f64..0.99, any::<u64>()).prop_map(|(n, na, k, gamma, seed)| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut terminal = vec![false; n];
        terminal[n - 1] = rng.random_bool(0.5);
        let mut transitions = Vec::new();
        for _ in 0..n * na {
            let w: Vec<f64> = (0..n).map(|_| if rng.random_bool(0.6) { rng.random::<f64>() } else { 0.0 }).collect();
            let total: f64 = w.iter().sum();
            let row = if total == 0.0 {
                vec![(rng.random_range(0..n), 1.0)]
            } else {
                w.iter().enumerate().filter(|(_, &p)| p > 0.0).map(|(j, &p)| (j, p / total)).collect()
            };
            transitions.push(row);
        }
        let features: Vec<Vec<f64>> = (0..n).map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
        let mdp = Mdp::new(n, na, transitions, terminal, 0, features, gamma).unwrap();
        let policy = Policy::new((0..n).map(|_| rng.random_range(0..na)).collect());
        let reward = (0..k).map(|_| rng.random_range(-1.0..=1.0)).collect();
        Case {
            mdp,
            policy,
            reward,
            gamma,
        }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bellman_residuals_vanish(case in random_mdp()) {
        let r = RewardVector::new(case.reward.clone()).unwrap();
        let vt = evaluate_policy(&case.mdp, &r, &case.policy, case.gamma).unwrap();
        prop_assert!(bellman_residual(&case.mdp, &r, &case.policy, case.gamma, &vt).unwrap() < 1e-10);
        let (opt, vt) = optimal_policy(&case.mdp, &r, case.gamma).unwrap();
        prop_assert!(bellman_residual(&case.mdp, &r, &opt, case.gamma, &vt).unwrap() < 1e-10);
    }

    #[test]
    fn feature_expectation_values_match(case in random_mdp()) {
        let r = RewardVector::new(case.reward.clone()).unwrap();
        let fe = compute_feature_expectations(&case.mdp, &case.policy, case.gamma).unwrap();
        let a = value_from_expectations(&fe, &r).unwrap();
        let b = evaluate_policy(&case.mdp, &r, &case.policy, case.gamma).unwrap();
        for (x, y) in a.v.iter().zip(&b.v).chain(a.q.iter().zip(&b.q)) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn values_are_linear_in_reward(case in random_mdp(), c in 0.01f64..1.0) {
        let r = RewardVector::new(case.reward.clone()).unwrap();
        let a = evaluate_policy(&case.mdp, &r, &case.policy, case.gamma).unwrap();
        let b = evaluate_policy(&case.mdp, &r.scaled(c), &case.policy, case.gamma).unwrap();
        for (x, y) in a.v.iter().zip(&b.v) {
            prop_assert!((c * x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn gap_scales_and_policy_is_scale_invariant(case in random_mdp(), c in 0.01f64..1.0) {
        prop_assume!(case.mdp.decision_states().next().is_some());
        let r = RewardVector::new(case.reward.clone()).unwrap();
        let pi = optimal_policy(&case.mdp, &r, case.gamma).unwrap().0;
        let g = action_gap(&case.mdp, &r, &pi, case.gamma).unwrap();
        let gc = action_gap(&case.mdp, &r.scaled(c), &pi, case.gamma).unwrap();
        prop_assert!((c * g - gc).abs() < 1e-9);
        prop_assert!(g >= -1e-9);
        if g > 1e-9 {
            let pic = optimal_policy(&case.mdp, &r.scaled(c), case.gamma).unwrap().0;
            prop_assert!(pic.agrees_with(&pi, &case.mdp));
        }
    }

    #[test]
    fn lp_optimum_ignores_row_order(case in random_mdp(), gt in 0.0f64..0.99, seed in any::<u64>()) {
        prop_assume!(case.mdp.decision_states().next().is_some());
        let lp = build_lp(&case.mdp, &case.policy, case.gamma, gt).unwrap();
        let a = solve_lp(&lp).unwrap();
        let mut shuffled = lp.clone();
        shuffled.constraints.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let b = solve_lp(&shuffled).unwrap();
        prop_assert_eq!(a.status, b.status);
        prop_assert!((a.objective_value - b.objective_value).abs() < 1e-7);
        prop_assert!(lp.max_violation(&a.x) < 1e-9);
    }

    #[test]
    fn environment_text_round_trips(case in random_mdp()) {
        let text = write_environment(&case.mdp, &case.policy);
        let (m, pi) = parse_environment(&text).unwrap();
        prop_assert_eq!(m, case.mdp);
        prop_assert_eq!(pi, case.policy);
    }

    #[test]
    fn parser_never_panics(text in "\\PC{0,400}") {
        let _ = parse_environment(&text);
        let _ = rewardgap::format::parse_reward(&text);
        let _ = rewardgap::lp::LpProblem::from_text(&text);
    }

    #[test]
    fn q_learning_is_deterministic(seed in any::<u64>()) {
        let (m, pi) = russell_norvig_grid();
        let r = RewardVector::new(vec![-0.04, 1.0, -1.0]).unwrap();
        let cfg = QLearningConfig { steps: 300, seed, ..Default::default() };
        let a = q_learning_run(&m, &r, &pi, 0.95, &cfg).unwrap();
        let b = q_learning_run(&m, &r, &pi, 0.95, &cfg).unwrap();
        prop_assert_eq!(a.cumulative_correct, b.cumulative_correct);
        let bits = |q: &[f64]| q.iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        prop_assert_eq!(bits(&a.final_q), bits(&b.final_q));
    }
}

#[test]
fn chain_closed_forms() {
    for n in [3usize, 10, 60] {
        for g in [0.5, 0.9, 0.95] {
            let (m, pi) = rewardgap::environments::chain_with_discount(n, ChainVariant::TwoFeature, g).unwrap();
            let p = g.powi(n as i32 - 1);
            for (w, oracle) in [([1.0, 0.0], p * (1.0 - g)), ([0.0, -1.0], p), ([1.0, -1.0], p * (2.0 - g))] {
                let gap = action_gap(&m, &RewardVector::new(w.to_vec()).unwrap(), &pi, g).unwrap();
                assert!((gap - oracle).abs() < 1e-9, "n={n} g={g} w={w:?}: {gap} vs {oracle}");
            }
        }
    }
}

#[test]
fn aggregate_is_independent_of_thread_count() {
    let (m, pi) = chain(20, ChainVariant::TwoFeature).unwrap();
    let r = RewardVector::new(vec![1.0, -1.0]).unwrap();
    let cfg = QLearningConfig { steps: 400, seed: 5, ..Default::default() };
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let a = pool(1).install(|| aggregate_runs(&m, &r, &pi, 0.95, &cfg, 70).unwrap());
    let b = pool(4).install(|| aggregate_runs(&m, &r, &pi, 0.95, &cfg, 70).unwrap());
    assert_eq!(a, b);
}

#[test]
fn sampling_is_independent_of_thread_count() {
    let (m, pi) = chain(5, ChainVariant::TwoFeature).unwrap();
    let pool = |n| rayon::ThreadPoolBuilder::new().num_threads(n).build().unwrap();
    let a = pool(1).install(|| sample_and_filter(&m, &pi, 30_000, 3).unwrap());
    let b = pool(3).install(|| sample_and_filter(&m, &pi, 30_000, 3).unwrap());
    assert_eq!(a, b);
}
