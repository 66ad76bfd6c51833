#![allow(dead_code)]

use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trustplan::generators::{blocks_world, random_grid_model, random_pair};
use trustplan::metamdp::{build_mdp, LevelSpec, Response, ResponseMode};
use trustplan::planning::SearchLimits;
use trustplan::reconcile::{strategy_triple, ExplicabilityMetric, StrategyOptions};
use trustplan::supervisor::InterventionMap;
use trustplan::{Cost, ModelPair, StrategyTag, StrategyTriple, TrustMdp, TrustScenario};

pub fn scenario_file(rel: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(rel)
}

pub fn small_model(rng: &mut ChaCha8Rng) -> trustplan::PlanningModel {
    if rng.random_bool(0.6) {
        let (h, w) = (rng.random_range(4..=6), rng.random_range(4..=6));
        random_grid_model(rng, h, w)
    } else {
        let n = rng.random_range(2..=3);
        blocks_world(rng, n)
    }
}

pub fn pair(seed: u64, max_delta: usize) -> ModelPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_pair(&mut rng, max_delta, &SearchLimits::default(), small_model)
}

pub struct Built {
    pub scenario: TrustScenario,
    pub triples: Vec<StrategyTriple>,
    pub interventions: InterventionMap,
    pub mdp: TrustMdp,
}

pub fn build(scenario: TrustScenario) -> Built {
    let limits = SearchLimits::default();
    let triples: Vec<StrategyTriple> = scenario
        .levels
        .iter()
        .map(|l| strategy_triple(&l.task, &StrategyOptions::default()).unwrap())
        .collect();
    let interventions = InterventionMap::build(&scenario, &triples, &limits).unwrap();
    let mdp = build_mdp(&scenario, &triples, &interventions).unwrap();
    Built {
        scenario,
        triples,
        interventions,
        mdp,
    }
}

/// A valid scenario over `k` random tasks with random anchors, monitoring
/// probabilities, discount, penalty and response.
pub fn random_scenario(seed: u64, k: usize) -> TrustScenario {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut anchors: Vec<f64> = (1..k).map(|_| rng.random_range(0.01..1.0)).collect();
    anchors.push(0.0);
    anchors.sort_by(f64::total_cmp);
    anchors.dedup();
    while anchors.len() < k {
        let top = *anchors.last().unwrap();
        anchors.push((top + 1.0) / 2.0);
    }
    let mut omegas: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=1.0)).collect();
    omegas.sort_by(|a, b| b.total_cmp(a));
    let levels = anchors
        .iter()
        .zip(&omegas)
        .enumerate()
        .map(|(i, (&anchor, &omega))| LevelSpec {
            anchor,
            omega,
            task_name: format!("task-{i}"),
            task: random_pair(&mut rng, 4, &SearchLimits::default(), small_model),
        })
        .collect();
    let mode = if rng.random_bool(0.5) {
        ResponseMode::Binary
    } else {
        ResponseMode::Boltzmann
    };
    TrustScenario {
        name: format!("random-{seed}"),
        levels,
        gamma: rng.random_range(0.0..0.95),
        fail_penalty: Cost::from_int(rng.random_range(0..40)),
        response: Response {
            mode,
            beta: rng.random_range(0.1..2.0),
        },
        metric: ExplicabilityMetric::HumanModelDiff,
        strategies: StrategyTag::ALL.to_vec(),
    }
}
