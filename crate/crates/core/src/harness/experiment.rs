use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::harness::config::LoadedScenario;
use crate::harness::HarnessError;
use crate::metamdp::{build_mdp, solve, MdpReport, MetaPolicy, TrustMdp, TrustScenario, DEFAULT_TOLERANCE};
use crate::planning::SearchLimits;
use crate::reconcile::{strategy_triple, StrategyTag, StrategyTriple};
use crate::supervisor::{InterventionMap, Surprise};

/// A loaded scenario with everything derived from it: strategy triples,
/// surprise points, the intervention map, the decision process and its
/// solved policy.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub loaded: LoadedScenario,
    pub scenario: TrustScenario,
    /// Per level, in level order.
    pub triples: Vec<StrategyTriple>,
    pub surprises: Vec<BTreeMap<StrategyTag, Surprise>>,
    pub interventions: InterventionMap,
    pub mdp: TrustMdp,
    pub policy: MetaPolicy,
    /// Original task index behind each level.
    pub order: Vec<usize>,
    pub limits: SearchLimits,
}

/// Changes applied on top of a scenario, as used by sweeps.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Variant {
    pub gamma: Option<f64>,
    pub anchors: Option<Vec<f64>>,
    pub omega: Option<Vec<f64>>,
    /// Multiplies every monitoring probability (clamped to `[0, 1]`).
    pub omega_scale: Option<f64>,
    /// `order[i]` is the task used at level `i + 1`.
    pub order: Option<Vec<usize>>,
}

impl Experiment {
    pub fn new(loaded: LoadedScenario, limits: &SearchLimits) -> Result<Experiment, HarnessError> {
        let scenario = loaded.scenario();
        let opts = loaded.config.strategy_options(limits);
        let analysed = scenario
            .levels
            .par_iter()
            .map(|level| {
                let triple = strategy_triple(&level.task, &opts)?;
                let surprises = InterventionMap::task_surprises(&triple, &level.task, limits)?;
                Ok((triple, surprises))
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        let (triples, surprises): (Vec<_>, Vec<_>) = analysed.into_iter().unzip();
        let order = (0..scenario.k()).collect();
        Self::assemble(loaded, scenario, triples, surprises, order, limits.clone())
    }

    fn assemble(
        loaded: LoadedScenario,
        scenario: TrustScenario,
        triples: Vec<StrategyTriple>,
        surprises: Vec<BTreeMap<StrategyTag, Surprise>>,
        order: Vec<usize>,
        limits: SearchLimits,
    ) -> Result<Experiment, HarnessError> {
        let interventions = InterventionMap::new(scenario.anchors(), surprises.clone());
        let mdp = build_mdp(&scenario, &triples, &interventions)?;
        let policy = solve(&mdp, DEFAULT_TOLERANCE)?;
        Ok(Experiment {
            loaded,
            scenario,
            triples,
            surprises,
            interventions,
            mdp,
            policy,
            order,
            limits,
        })
    }

    /// The same experiment with a modified scenario; strategy triples are
    /// reused, so no planning is repeated.
    pub fn with_variant(&self, v: &Variant) -> Result<Experiment, HarnessError> {
        let k = self.scenario.k();
        let mut scenario = self.scenario.clone();
        let (mut triples, mut surprises, mut order) =
            (self.triples.clone(), self.surprises.clone(), self.order.clone());
        if let Some(perm) = &v.order {
            let mut seen = perm.clone();
            seen.sort_unstable();
            if seen != (0..k).collect::<Vec<_>>() {
                return Err(HarnessError::Invalid(format!(
                    "task order {perm:?} is not a permutation of 0..{k}"
                )));
            }
            for (i, &j) in perm.iter().enumerate() {
                scenario.levels[i].task = self.scenario.levels[j].task.clone();
                scenario.levels[i].task_name = self.scenario.levels[j].task_name.clone();
                triples[i] = self.triples[j].clone();
                surprises[i] = self.surprises[j].clone();
                order[i] = self.order[j];
            }
        }
        if let Some(g) = v.gamma {
            scenario.gamma = g;
        }
        if let Some(anchors) = &v.anchors {
            if anchors.len() != k {
                return Err(HarnessError::Invalid(format!(
                    "expected {k} anchors, got {}",
                    anchors.len()
                )));
            }
            for (i, (level, &a)) in scenario.levels.iter_mut().zip(anchors).enumerate() {
                level.anchor = a;
                if self.loaded.config.levels[i].omega.is_none() {
                    level.omega = 1.0 - a;
                }
            }
        }
        if let Some(omega) = &v.omega {
            if omega.len() != k {
                return Err(HarnessError::Invalid(format!(
                    "expected {k} omega values, got {}",
                    omega.len()
                )));
            }
            for (level, &w) in scenario.levels.iter_mut().zip(omega) {
                level.omega = w;
            }
        }
        if let Some(scale) = v.omega_scale {
            for level in &mut scenario.levels {
                level.omega = (level.omega * scale).clamp(0.0, 1.0);
            }
        }
        Self::assemble(
            self.loaded.clone(),
            scenario,
            triples,
            surprises,
            order,
            self.limits.clone(),
        )
    }

    /// Re-solves with new monitoring probabilities.
    pub fn resolve_with_omega(&self, omega: &[f64]) -> Result<MetaPolicy, HarnessError> {
        let mut scenario = self.scenario.clone();
        for (level, &w) in scenario.levels.iter_mut().zip(omega) {
            level.omega = w;
        }
        let mdp = build_mdp(&scenario, &self.triples, &self.interventions)?;
        Ok(solve(&mdp, DEFAULT_TOLERANCE)?)
    }

    pub fn report(&self) -> MdpReport {
        MdpReport::new(&self.scenario, &self.mdp, &self.policy)
    }

    pub fn k(&self) -> usize {
        self.scenario.k()
    }
}
