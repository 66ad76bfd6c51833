use std::fs;

use proptest::prelude::*;

mod common;
use common::scenario_file;

use trustplan::grid::{GridCosts, GridMap};
use trustplan::harness::{
    compare_conditions, load_pair, run_episode, score_round, sweep, total, Choice, Condition, ConfigError, Experiment,
    LoadedScenario, PolicySource, RoundResult, SweepAxis,
};
use trustplan::planning::{parse_model, SearchLimits};
use trustplan::{Cost, StrategyTag};

fn experiment(rel: &str) -> Experiment {
    let limits = SearchLimits::default();
    Experiment::new(LoadedScenario::load(&scenario_file(rel), &limits).unwrap(), &limits).unwrap()
}

fn canonical(t: &impl serde::Serialize) -> String {
    serde_json::to_string(&serde_json::to_value(t).unwrap()).unwrap()
}

#[test]
fn bundled_triples_satisfy_dominance() {
    for rel in ["rover/scenario.toml", "office/scenario.toml"] {
        let exp = experiment(rel);
        assert_eq!(exp.triples.len(), exp.k());
        for t in &exp.triples {
            assert!(t.dominance_holds(), "{rel}: {t:?}");
            assert!(t.explicable.is_perfectly_explicable());
        }
    }
}

#[test]
fn office_models_are_compiled_from_the_maps() {
    let dir = scenario_file("office");
    for task in ["reach", "coffee-hall", "coffee-lab", "coffee-relay"] {
        for side in ["human", "robot"] {
            let map = GridMap::parse(&fs::read_to_string(dir.join(format!("{task}.{side}.map"))).unwrap()).unwrap();
            let model = parse_model(&fs::read_to_string(dir.join(format!("{task}.{side}.model"))).unwrap()).unwrap();
            assert_eq!(map.to_model(&GridCosts::default()).unwrap(), model, "{task}.{side}");
        }
        let human = fs::read_to_string(dir.join(format!("{task}.human.map"))).unwrap();
        let robot = fs::read_to_string(dir.join(format!("{task}.robot.map"))).unwrap();
        assert_eq!(
            human.replace('R', "r"),
            robot,
            "{task}: maps differ only in rubble belief"
        );
    }
}

#[test]
fn office_policy_defers_to_trust_from_level_three() {
    let exp = experiment("office/scenario.toml");
    assert_eq!(exp.policy.short(), "[exp, exp, opt, opt]");
    let table = sweep(&exp, &trustplan::harness::default_axes(&exp)).unwrap();
    assert_eq!(table.points.len(), 27);
    assert_eq!(
        table.modal_policy,
        vec![
            StrategyTag::Explicable,
            StrategyTag::Explicable,
            StrategyTag::Optimal,
            StrategyTag::Optimal
        ]
    );
}

#[test]
fn never_monitoring_makes_optimal_plans_best_everywhere() {
    let exp = experiment("office/scenario.toml");
    let axis: SweepAxis = "omega=0,0,0,0".parse().unwrap();
    let table = sweep(&exp, &[axis]).unwrap();
    assert_eq!(table.modal_policy, vec![StrategyTag::Optimal; 4]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn episodes_are_reproducible_and_consistent(seed in any::<u64>(), c in 0usize..4, recomputed in any::<bool>()) {
        let exp = experiment("office/scenario.toml");
        let condition = Condition::ALL[c];
        let source = if recomputed { PolicySource::Recomputed } else { PolicySource::Fixed };
        let a = run_episode(&exp, condition, seed, source).unwrap();
        let b = run_episode(&exp, condition, seed, source).unwrap();
        prop_assert_eq!(canonical(&a), canonical(&b));

        let cfg = &exp.loaded.config;
        prop_assert_eq!(a.rounds.len(), cfg.rounds);
        prop_assert_eq!(a.trajectory.len(), cfg.rounds);
        let exec: Cost = a.rounds.iter().map(|r| r.realized_cost).sum();
        let mon: Cost = a.rounds.iter().map(|r| r.monitoring_cost).sum();
        prop_assert_eq!(a.cumulative_execution_cost, exec);
        prop_assert_eq!(a.cumulative_monitoring_cost, mon);
        prop_assert_eq!(a.total_cost, exec + mon);
        prop_assert_eq!(a.total_points, a.rounds.iter().map(|r| total(&r.points)).sum::<i64>());
        for (i, r) in a.rounds.iter().enumerate() {
            prop_assert!(r.stopped_at.is_none() || r.monitored);
            prop_assert_eq!(r.choice == Choice::Monitor, r.monitored);
            let expected = score_round(r.choice, RoundResult { stopped: r.stopped_at.is_some(), goal_reached: r.goal_reached }, &cfg.scoring).unwrap();
            prop_assert_eq!(&r.points, &expected);
            prop_assert_eq!(a.trajectory[i].level, r.next_level);
            if i + 1 < a.rounds.len() {
                prop_assert_eq!(a.rounds[i + 1].level, r.next_level);
            }
            if condition == Condition::AlwaysOptimal {
                prop_assert_eq!(r.strategy, StrategyTag::Optimal);
            }
        }
    }
}

#[test]
fn comparison_tables_are_deterministic() {
    let exp = experiment("rover/scenario.toml");
    let seeds: Vec<u64> = (0..50).collect();
    let a = compare_conditions(&exp, &Condition::ALL, &seeds, PolicySource::Fixed).unwrap();
    let b = compare_conditions(&exp, &Condition::ALL, &seeds, PolicySource::Fixed).unwrap();
    assert_eq!(a.to_string(), b.to_string());
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.plot_data().lines().count(), 1 + 4 * 50);
    assert_eq!(a.summaries.len(), 4);
    // Explicable plans are never stopped and always climb, so execution cost
    // is the same in every episode; only monitoring varies.
    let runs = &a.episodes[&Condition::AlwaysExplicable];
    assert!(runs.iter().all(|m| m.execution_cost == runs[0].execution_cost));
    assert!(runs.iter().all(|m| m.final_level == 4));
}

#[test]
fn config_errors_name_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let limits = SearchLimits::default();
    let missing = dir.path().join("nope.toml");
    let err = LoadedScenario::load(&missing, &limits).unwrap_err();
    assert!(matches!(err, ConfigError::Io { .. }));
    assert!(err.to_string().contains("nope.toml"));

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\n[[levels]]\nanchor = 0.0\ntask = \"t.toml\"\n").unwrap();
    let err = LoadedScenario::load(&bad, &limits).unwrap_err();
    assert!(
        err.to_string().contains("t.toml") || err.to_string().contains("bad.toml"),
        "{err}"
    );

    let pair = dir.path().join("pair.toml");
    fs::write(&pair, "robot = \"r.model\"\nhuman = \"h.model\"\nextra = 1\n").unwrap();
    assert!(matches!(
        load_pair(&pair, &limits).unwrap_err(),
        ConfigError::Parse { .. }
    ));
}
