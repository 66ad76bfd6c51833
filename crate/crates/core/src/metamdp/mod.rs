//! The meta-level decision process over discretised trust levels.
//!
//! States are trust levels `1..=k` (stored 0-based), actions are the
//! strategies offered per task, and costs blend plan execution, explanation,
//! interrupted prefixes and a goal-failure penalty.

mod build;
mod report;
mod solve;

use serde::{Deserialize, Serialize};

use crate::cost::{Cost, Score};
use crate::reconcile::{ExplicabilityMetric, ModelPair, StrategyTag};

pub use build::{build_mdp, ActionInfo, TrustMdp};
pub use report::{MdpReport, ReportAction, ReportState};
pub use solve::{evaluate_policy, solve, MetaPolicy, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetaError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("expected {expected} strategy triples, got {got}")]
    TripleCount { expected: usize, got: usize },
    #[error("no intervention entry for level {level}, strategy {strategy}")]
    MissingIntervention { level: usize, strategy: StrategyTag },
    #[error("non-finite cost for level {level}, strategy {strategy}")]
    NonFiniteCost { level: usize, strategy: StrategyTag },
    #[error("policy has {got} entries for {expected} states")]
    PolicyLength { expected: usize, got: usize },
    #[error("strategy {strategy} is not offered")]
    UnknownAction { strategy: StrategyTag },
    #[error("discount must lie in [0, 1), got {0}")]
    Discount(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ResponseMode {
    /// `exp(beta * EX)`.
    #[default]
    Boltzmann,
    /// 1 for a perfectly explicable plan, 0 otherwise.
    Binary,
}

/// How likely a monitoring supervisor is to keep their trust level after
/// watching a plan with the given explicability score.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Response {
    pub mode: ResponseMode,
    pub beta: f64,
}

impl Default for Response {
    fn default() -> Self {
        Response {
            mode: ResponseMode::Boltzmann,
            beta: 1.0,
        }
    }
}

impl Response {
    pub fn probability(&self, ex: Score) -> f64 {
        explicability_response(ex, self.beta, self.mode)
    }
}

pub fn explicability_response(ex: Score, beta: f64, mode: ResponseMode) -> f64 {
    match (mode, ex) {
        (_, Score::NegInfinity) => 0.0,
        (ResponseMode::Binary, s) => {
            if s.is_perfect() {
                1.0
            } else {
                0.0
            }
        }
        (ResponseMode::Boltzmann, Score::Finite(c)) => (beta * c.to_f64()).exp().min(1.0),
    }
}

/// One trust level of the curriculum.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelSpec {
    /// Lower trust anchor `T(i)`.
    pub anchor: f64,
    /// Monitoring probability at this level.
    pub omega: f64,
    pub task_name: String,
    pub task: ModelPair,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrustScenario {
    pub name: String,
    pub levels: Vec<LevelSpec>,
    pub gamma: f64,
    pub fail_penalty: Cost,
    pub response: Response,
    pub metric: ExplicabilityMetric,
    /// Strategies the meta level may choose from, in tie-break order.
    pub strategies: Vec<StrategyTag>,
}

impl TrustScenario {
    pub fn k(&self) -> usize {
        self.levels.len()
    }

    pub fn anchors(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.anchor).collect()
    }

    pub fn omegas(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.omega).collect()
    }

    pub fn validate(&self) -> Result<(), MetaError> {
        let bad = |m: String| Err(MetaError::InvalidScenario(m));
        if self.levels.len() < 2 {
            return bad(format!("need at least 2 trust levels, got {}", self.levels.len()));
        }
        for (i, l) in self.levels.iter().enumerate() {
            if !(0.0..=1.0).contains(&l.anchor) {
                return bad(format!("anchor of level {} is {}, outside [0, 1]", i + 1, l.anchor));
            }
            if !(0.0..=1.0).contains(&l.omega) {
                return bad(format!("omega of level {} is {}, outside [0, 1]", i + 1, l.omega));
            }
        }
        for (i, w) in self.levels.windows(2).enumerate() {
            if w[1].anchor <= w[0].anchor {
                return bad(format!(
                    "anchors must increase strictly (levels {} and {})",
                    i + 1,
                    i + 2
                ));
            }
            if w[1].omega > w[0].omega {
                return bad(format!(
                    "omega must not increase with trust (levels {} and {})",
                    i + 1,
                    i + 2
                ));
            }
        }
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must lie in [0, 1), got {}", self.gamma));
        }
        if self.fail_penalty.is_negative() {
            return bad(format!("fail penalty must be non-negative, got {}", self.fail_penalty));
        }
        if !(self.response.beta > 0.0 && self.response.beta.is_finite()) {
            return bad(format!("response beta must be positive, got {}", self.response.beta));
        }
        if self.strategies.is_empty() {
            return bad("at least one strategy must be offered".into());
        }
        let mut sorted = self.strategies.clone();
        sorted.sort();
        sorted.dedup();
        if sorted.len() != self.strategies.len() {
            return bad("strategies listed twice".into());
        }
        Ok(())
    }
}

/// Equal-width trust intervals for `k` levels: `[0, 1/k], (1/k, 2/k], ...`.
pub fn interval(level: usize, k: usize) -> (f64, f64) {
    ((level - 1) as f64 / k as f64, level as f64 / k as f64)
}
