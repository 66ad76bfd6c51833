//! Trust-aware planning for a robot that works under intermittent human
//! supervision.
//!
//! * [`planning`]: grounded STRIPS models, parsing, validation and optimal
//!   search;
//! * [`reconcile`]: model differences, explanations, explicability and the
//!   explicable / balanced / optimal strategy triple;
//! * [`metamdp`]: the trust-level decision process and its solver;
//! * [`supervisor`]: the simulated supervisor (monitoring, interventions,
//!   trust updates and monitoring-probability estimates);
//! * [`harness`]: configuration, episodes, condition comparisons, sweeps,
//!   scoring and the study session state machine.

pub mod cost;
#[cfg(feature = "test-oracles")]
pub mod generators;
pub mod grid;
pub mod harness;
pub mod metamdp;
#[cfg(feature = "test-oracles")]
pub mod oracle;
pub mod planning;
pub mod reconcile;
pub mod supervisor;

pub use cost::{Cost, ExtCost, ParseCostError, Score};
pub use metamdp::{MetaPolicy, TrustMdp, TrustScenario};
pub use planning::{Plan, PlanningModel, SearchError, SearchLimits};
pub use reconcile::{AnnotatedPlan, Message, ModelPair, StrategyTag, StrategyTriple};
