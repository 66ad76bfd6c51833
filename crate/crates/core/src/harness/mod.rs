//! Scenario configuration, simulation of supervised episodes, condition
//! comparisons, parameter sweeps, study scoring and live sessions.

pub mod compare;
pub mod config;
pub mod episode;
pub mod experiment;
pub mod scoring;
pub mod session;
pub mod stats;
pub mod store;
pub mod sweep;

pub use compare::{compare_conditions, Comparison, ConditionSummary, EpisodeMetrics};
pub use config::{load_pair, ConfigError, LoadedPair, LoadedScenario, PairConfig, ScenarioConfig};
pub use episode::{run_episode, Condition, EpisodeTrace, PolicySource, RoundOutcome};
pub use experiment::{Experiment, Variant};
pub use scoring::{score_round, total, Choice, PointEntry, PointReason, RoundResult, ScoringError, ScoringTable};
pub use session::{Phase, RoundView, Session, SessionError, SessionSummary, StepView};
pub use store::{Clock, LogLine, SessionStore, StepClock, SystemClock};
pub use sweep::{default_axes, sweep, SweepAxis, SweepTable};

use crate::metamdp::MetaError;
use crate::reconcile::ReconcileError;
use crate::supervisor::SupervisorError;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Reconcile(#[from] ReconcileError),
    #[error(transparent)]
    Meta(#[from] MetaError),
    #[error(transparent)]
    Supervisor(#[from] SupervisorError),
    #[error(transparent)]
    Scoring(#[from] ScoringError),
    #[error("{0}")]
    Invalid(String),
}
