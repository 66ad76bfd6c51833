//! The simulated human supervisor: monitoring draws, intervention timing,
//! trust bookkeeping, questionnaires and monitoring-probability estimates.

mod intervention;
mod omega;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::metamdp::{interval, TrustScenario};
use crate::reconcile::AnnotatedPlan;

pub use intervention::{intervention_step, stop_step, surprise_step, InterventionMap, Surprise};
pub use omega::{estimate_omega, OmegaEstimate};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SupervisorError {
    #[error("rating `{item}` is {value}, outside [0, 1]")]
    RatingOutOfRange { item: &'static str, value: f64 },
    #[error("a plan cannot be stopped without being monitored")]
    StoppedWithoutMonitoring,
    #[error("trust level {level} outside 1..={k}")]
    LevelOutOfRange { level: usize, k: usize },
}

/// Snap to a 1e-9 grid so sums of decimal ratings land exactly on interval
/// boundaries.
fn snap(x: f64) -> f64 {
    (x * 1e9).round() / 1e9
}

/// Trust level (1-based) of a scalar in `[0, 1]` under `k` equal-width
/// intervals, the first closed and the rest open on the left.
pub fn level_of(scalar: f64, k: usize) -> usize {
    let s = snap(scalar.clamp(0.0, 1.0));
    ((s * k as f64).ceil() as usize).clamp(1, k)
}

pub fn level_midpoint(level: usize, k: usize) -> f64 {
    let (lo, hi) = interval(level, k);
    (lo + hi) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupervisorState {
    pub trust_scalar: f64,
    pub trust_level: usize,
    pub k: usize,
}

impl SupervisorState {
    pub fn at_level(level: usize, k: usize) -> SupervisorState {
        SupervisorState {
            trust_scalar: level_midpoint(level, k),
            trust_level: level,
            k,
        }
    }

    pub fn from_scalar(scalar: f64, k: usize) -> SupervisorState {
        SupervisorState {
            trust_scalar: scalar,
            trust_level: level_of(scalar, k),
            k,
        }
    }

    /// Moves to `level`, resetting the scalar to the interval midpoint when
    /// the level changes.
    pub fn move_to(&mut self, level: usize) {
        if level != self.trust_level {
            *self = SupervisorState::at_level(level, self.k);
        }
    }
}

/// Whether the supervisor watches this round: Bernoulli with the level's
/// monitoring probability.
pub fn monitor_decision<R: Rng + ?Sized>(level: usize, scenario: &TrustScenario, rng: &mut R) -> bool {
    rng.random_bool(scenario.levels[level - 1].omega)
}

/// Next trust level after one round.
///
/// Unmonitored rounds and perfectly explicable plans move up one level.
/// A monitored imperfect plan keeps the level with the response probability
/// and drops one level otherwise. Levels are clamped to `1..=k`.
pub fn sample_trust_transition<R: Rng + ?Sized>(
    level: usize,
    annotated: &AnnotatedPlan,
    monitored: bool,
    stopped: bool,
    scenario: &TrustScenario,
    rng: &mut R,
) -> Result<usize, SupervisorError> {
    let k = scenario.k();
    if level == 0 || level > k {
        return Err(SupervisorError::LevelOutOfRange { level, k });
    }
    if stopped && !monitored {
        return Err(SupervisorError::StoppedWithoutMonitoring);
    }
    if !monitored || annotated.is_perfectly_explicable() {
        return Ok((level + 1).min(k));
    }
    let keep = scenario.response.probability(annotated.explicability);
    Ok(if rng.random_bool(keep) {
        level
    } else {
        (level - 1).max(1)
    })
}

/// Four-item trust questionnaire, each item normalised to `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Questionnaire {
    pub predictability: f64,
    pub dependability: f64,
    pub faith: f64,
    pub trust: f64,
}

impl Questionnaire {
    pub fn items(&self) -> [(&'static str, f64); 4] {
        [
            ("predictability", self.predictability),
            ("dependability", self.dependability),
            ("faith", self.faith),
            ("trust", self.trust),
        ]
    }

    /// Mean rating and the trust level it falls in.
    pub fn score(&self, k: usize) -> Result<(f64, usize), SupervisorError> {
        for (item, value) in self.items() {
            if !(0.0..=1.0).contains(&value) {
                return Err(SupervisorError::RatingOutOfRange { item, value });
            }
        }
        let mean = snap(self.items().iter().map(|(_, v)| v).sum::<f64>() / 4.0);
        Ok((mean, level_of(mean, k)))
    }
}

pub fn trust_from_questionnaire(ratings: [f64; 4], k: usize) -> Result<(f64, usize), SupervisorError> {
    Questionnaire {
        predictability: ratings[0],
        dependability: ratings[1],
        faith: ratings[2],
        trust: ratings[3],
    }
    .score(k)
}
