use std::collections::BTreeMap;

use serde::Serialize;

use crate::metamdp::TrustScenario;
use crate::planning::{apply, SearchLimits};
use crate::reconcile::{AnnotatedPlan, ModelPair, ReconcileError, StrategyTag, StrategyTriple};

/// Where a plan first surprises the supervisor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Surprise {
    /// 1-based step of the first surprising action; `None` for perfectly
    /// explicable plans.
    pub first: Option<usize>,
    pub len: usize,
}

/// First step at which the executed prefix stops matching the supervisor's
/// (explanation-updated) model: an action that is inapplicable there, or a
/// departure from the plan they now expect. `None` for perfectly explicable
/// plans.
pub fn surprise_step(
    annotated: &AnnotatedPlan,
    pair: &ModelPair,
    limits: &SearchLimits,
) -> Result<Surprise, ReconcileError> {
    let len = annotated.plan.len();
    if annotated.is_perfectly_explicable() {
        return Ok(Surprise { first: None, len });
    }
    let model = pair.updated_human(&annotated.explanation)?;
    let (expected, _) = pair.expected_after(&annotated.explanation, limits)?;
    let mut state = model.init().clone();
    let mut first = len;
    for (i, step) in annotated.plan.steps.iter().enumerate() {
        let next = model.action(step).and_then(|a| apply(&state, a));
        match next {
            Some(s) if expected.steps.get(i) == Some(step) => state = s,
            _ => {
                first = i + 1;
                break;
            }
        }
    }
    Ok(Surprise {
        first: Some(first.min(len)),
        len,
    })
}

/// Stop step for a plan of `len` steps first surprising at step `first`:
/// the supervisor waits `floor(anchor * (len - first))` more steps.
pub fn stop_step(anchor: f64, first: usize, len: usize) -> usize {
    let remaining = len.saturating_sub(first);
    let patience = (anchor * remaining as f64 + 1e-9).floor() as usize;
    (first + patience).min(len)
}

pub fn intervention_step(
    anchor: f64,
    annotated: &AnnotatedPlan,
    pair: &ModelPair,
    limits: &SearchLimits,
) -> Result<Option<usize>, ReconcileError> {
    let s = surprise_step(annotated, pair, limits)?;
    Ok(s.first.map(|d| stop_step(anchor, d, s.len)))
}

/// Stop steps for every (level, strategy), derived from per-task surprise
/// points and the level anchors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterventionMap {
    anchors: Vec<f64>,
    surprises: Vec<BTreeMap<StrategyTag, Surprise>>,
}

impl InterventionMap {
    pub fn new(anchors: Vec<f64>, surprises: Vec<BTreeMap<StrategyTag, Surprise>>) -> InterventionMap {
        InterventionMap { anchors, surprises }
    }

    /// Surprise points of each strategy of one task.
    pub fn task_surprises(
        triple: &StrategyTriple,
        pair: &ModelPair,
        limits: &SearchLimits,
    ) -> Result<BTreeMap<StrategyTag, Surprise>, ReconcileError> {
        StrategyTag::ALL
            .iter()
            .map(|&t| Ok((t, surprise_step(triple.get(t), pair, limits)?)))
            .collect()
    }

    pub fn build(
        scenario: &TrustScenario,
        triples: &[StrategyTriple],
        limits: &SearchLimits,
    ) -> Result<InterventionMap, ReconcileError> {
        let surprises = scenario
            .levels
            .iter()
            .zip(triples)
            .map(|(l, t)| Self::task_surprises(t, &l.task, limits))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(InterventionMap::new(scenario.anchors(), surprises))
    }

    /// `None` when the pair is unknown; `Some(None)` when the supervisor
    /// would not intervene.
    pub fn get(&self, level: usize, strategy: StrategyTag) -> Option<Option<usize>> {
        let anchor = *self.anchors.get(level.checked_sub(1)?)?;
        let s = self.surprises.get(level - 1)?.get(&strategy)?;
        Some(s.first.map(|d| stop_step(anchor, d, s.len)))
    }
}
