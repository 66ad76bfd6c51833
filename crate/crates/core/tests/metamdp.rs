use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

mod common;
use common::{build, random_scenario, scenario_file};

use trustplan::generators::random_mdp;
use trustplan::harness::{Experiment, LoadedScenario};
use trustplan::metamdp::{evaluate_policy, explicability_response, solve, ResponseMode, DEFAULT_TOLERANCE};
use trustplan::oracle;
use trustplan::planning::SearchLimits;
use trustplan::{Cost, Score, StrategyTag};

fn assert_close(a: &[f64], b: &[f64], tol: f64) {
    assert_eq!(a.len(), b.len());
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol * (1.0 + y.abs()), "{a:?} vs {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn solver_matches_policy_enumeration(seed in any::<u64>(), k in 2usize..=6, gamma in 0.0f64..0.95) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mdp = random_mdp(&mut rng, k, gamma);
        let p = solve(&mdp, 1e-9).unwrap();
        assert_close(&p.value, &oracle::optimal_values(&mdp), 1e-6);
        let exact = evaluate_policy(&mdp, &p.choice).unwrap();
        assert_close(&exact, &p.value, 1e-6);
        let idx: Vec<usize> = p.choice.iter().map(|t| mdp.action_index(*t).unwrap()).collect();
        assert_close(&oracle::policy_value(&mdp, &idx), &exact, 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn built_processes_are_stochastic_and_solved_exactly(seed in any::<u64>(), k in 2usize..=5) {
        let b = build(random_scenario(seed, k));
        for s in 0..k {
            for (a, row) in b.mdp.transitions[s].iter().enumerate() {
                prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
                prop_assert!(row.iter().all(|p| (0.0..=1.0).contains(p)));
                prop_assert!(b.mdp.costs[s][a] >= 0.0);
            }
        }
        let p = solve(&b.mdp, DEFAULT_TOLERANCE).unwrap();
        assert_close(&p.value, &oracle::optimal_values(&b.mdp), 1e-6);
    }

    #[test]
    fn monitored_rows_follow_the_response(seed in any::<u64>()) {
        let b = build(random_scenario(seed, 4));
        let sc = &b.scenario;
        for s in 1..3 {
            let w = sc.levels[s].omega;
            for (a, info) in b.mdp.info[s].iter().enumerate() {
                let row = &b.mdp.transitions[s][a];
                if info.perfectly_explicable {
                    prop_assert_eq!(row[s + 1], 1.0);
                } else {
                    let p = sc.response.probability(info.explicability);
                    prop_assert!((row[s] - w * p).abs() < 1e-12);
                    prop_assert!((row[s - 1] - w * (1.0 - p)).abs() < 1e-12);
                    prop_assert!((row[s + 1] - (1.0 - w)).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn never_monitored_supervisors_get_the_cheapest_strategy(seed in any::<u64>()) {
        let mut sc = random_scenario(seed, 4);
        for l in &mut sc.levels {
            l.omega = 0.0;
        }
        let b = build(sc);
        let p = solve(&b.mdp, DEFAULT_TOLERANCE).unwrap();
        for (s, tag) in p.choice.iter().enumerate() {
            let cheapest = b.mdp.costs[s].iter().copied().fold(f64::INFINITY, f64::min);
            let a = b.mdp.action_index(*tag).unwrap();
            prop_assert!((b.mdp.costs[s][a] - cheapest).abs() < 1e-9);
            prop_assert_eq!(b.mdp.costs[s][a], b.triples[s].get(*tag).execution_cost.to_f64());
        }
    }

    #[test]
    fn always_monitored_supervisors_with_a_harsh_penalty_get_perfectly_explicable_plans(seed in any::<u64>()) {
        let mut sc = random_scenario(seed, 4);
        sc.response.mode = ResponseMode::Binary;
        for l in &mut sc.levels {
            l.omega = 1.0;
        }
        let probe = build(sc.clone());
        let max_ce = probe
            .triples
            .iter()
            .flat_map(|t| StrategyTag::ALL.map(|tag| t.get(tag).execution_cost.to_f64()))
            .fold(0.0, f64::max);
        sc.fail_penalty = Cost::from_int(10 * (max_ce.ceil() as i64 + 1));
        let b = build(sc);
        let p = solve(&b.mdp, DEFAULT_TOLERANCE).unwrap();
        // The balanced option can also be perfectly explicable, and cheaper,
        // so the claim is about explicability rather than the tag.
        for (s, tag) in p.choice.iter().enumerate() {
            let chosen = b.triples[s].get(*tag);
            prop_assert!(chosen.is_perfectly_explicable(), "{}", p.short());
            let cheapest = StrategyTag::ALL
                .iter()
                .map(|t| b.triples[s].get(*t))
                .filter(|a| a.is_perfectly_explicable())
                .map(|a| a.execution_cost)
                .min()
                .unwrap();
            prop_assert_eq!(chosen.execution_cost, cheapest);
        }
    }
}

#[test]
fn boltzmann_response_is_monotone_in_explicability() {
    for beta in [0.1, 0.5, 1.0, 3.0] {
        let mut last = 0.0;
        for i in -200..=0 {
            let ex = Score::Finite(Cost::new(i, 4));
            let p = explicability_response(ex, beta, ResponseMode::Boltzmann);
            assert!((0.0..=1.0).contains(&p));
            assert!(p >= last, "beta {beta} at {ex}");
            last = p;
        }
        assert_eq!(last, 1.0);
        assert_eq!(
            explicability_response(Score::NegInfinity, beta, ResponseMode::Boltzmann),
            0.0
        );
    }
}

fn experiment(rel: &str) -> Experiment {
    let limits = SearchLimits::default();
    Experiment::new(LoadedScenario::load(&scenario_file(rel), &limits).unwrap(), &limits).unwrap()
}

#[test]
fn rover_policy_trusts_only_at_the_top() {
    let exp = experiment("rover/scenario.toml");
    assert_eq!(exp.policy.short(), "[exp, exp, exp, opt]");
    let always = evaluate_policy(&exp.mdp, &[StrategyTag::Explicable; 4]).unwrap();
    assert!(exp.policy.value[0] < always[0]);
    // Always-explicable at a discount of 0.9 is a geometric series.
    let ce = exp.triples[0].explicable.execution_cost.to_f64();
    assert!((always[0] - ce / (1.0 - 0.9)).abs() < 1e-9);
}

#[test]
fn bundled_scenarios_match_enumeration() {
    for rel in ["rover/scenario.toml", "office/scenario.toml"] {
        let exp = experiment(rel);
        assert_close(&exp.policy.value, &oracle::optimal_values(&exp.mdp), 1e-6);
    }
}
