//! Fixed fixtures shared by the benchmarks.

use std::collections::BTreeSet;
use std::path::PathBuf;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trustplan::generators::{blocks_world, random_grid_model, random_pair};
use trustplan::harness::{Experiment, LoadedScenario};
use trustplan::planning::SearchLimits;
use trustplan::reconcile::{explicability, ExplicabilityMetric};
use trustplan::{ModelPair, PlanningModel, Score};

pub fn experiment(name: &str) -> Experiment {
    let limits = SearchLimits::default();
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .join("scenario.toml");
    Experiment::new(LoadedScenario::load(&path, &limits).expect("bundled scenario"), &limits).expect("bundled scenario")
}

pub fn grid(seed: u64, h: usize, w: usize) -> PlanningModel {
    random_grid_model(&mut ChaCha8Rng::seed_from_u64(seed), h, w)
}

pub fn blocks(seed: u64, n: usize) -> PlanningModel {
    blocks_world(&mut ChaCha8Rng::seed_from_u64(seed), n)
}

/// A blocks-world pair whose robot plan needs explaining, with up to
/// `max_delta` model differences.
pub fn surprising_pair(seed: u64, max_delta: usize) -> ModelPair {
    let limits = SearchLimits::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let pair = random_pair(&mut rng, max_delta, &limits, |r| blocks_world(r, 3));
        let ex = explicability(
            pair.robot_plan(),
            &pair,
            &BTreeSet::new(),
            ExplicabilityMetric::HumanModelDiff,
            &limits,
        )
        .expect("solvable pair");
        if ex != Score::PERFECT {
            return pair;
        }
    }
}
