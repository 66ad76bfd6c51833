//! Deterministic goal-directed planning over grounded STRIPS-style models.

mod model;
mod parse;
mod search;

pub use model::{
    apply, is_valid_name, plan_cost, prefix_cost, validate_plan, ActionSchema, Fluent, ModelError, Plan, PlanningModel,
    State, ValidationReport,
};
pub use parse::{parse_model, serialize_model, ParseError};
pub use search::{cheapest_plans, optimal_plan, CancelToken, SearchError, SearchLimits, DEFAULT_NODE_BUDGET};
