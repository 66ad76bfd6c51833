use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::cost::{Cost, ExtCost};

pub type Fluent = String;

/// A world state: the set of fluents that currently hold.
pub type State = BTreeSet<Fluent>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModelError {
    #[error("undeclared fluent `{fluent}` referenced in {context}")]
    UndeclaredFluent { fluent: String, context: String },
    #[error("duplicate action `{0}`")]
    DuplicateAction(String),
    #[error("action `{0}` has a negative cost")]
    NegativeCost(String),
    #[error("action `{action}` both adds and deletes `{fluent}`")]
    ConflictingEffects { action: String, fluent: String },
    #[error("invalid name `{0}`: names must match [A-Za-z0-9_-]+")]
    InvalidName(String),
}

pub fn is_valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct ActionSchema {
    pub name: String,
    pub cost: Cost,
    pub pre: BTreeSet<Fluent>,
    pub add: BTreeSet<Fluent>,
    pub del: BTreeSet<Fluent>,
}

impl ActionSchema {
    pub fn new<I, S>(name: &str, cost: Cost, pre: I, add: I, del: I) -> ActionSchema
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        ActionSchema {
            name: name.to_string(),
            cost,
            pre: pre.into_iter().map(Into::into).collect(),
            add: add.into_iter().map(Into::into).collect(),
            del: del.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_applicable(&self, state: &State) -> bool {
        self.pre.is_subset(state)
    }

    fn check(&self, fluents: &BTreeSet<Fluent>) -> Result<(), ModelError> {
        if !is_valid_name(&self.name) {
            return Err(ModelError::InvalidName(self.name.clone()));
        }
        if self.cost.is_negative() {
            return Err(ModelError::NegativeCost(self.name.clone()));
        }
        for (part, set) in [("pre", &self.pre), ("add", &self.add), ("del", &self.del)] {
            if let Some(f) = set.iter().find(|f| !fluents.contains(*f)) {
                return Err(ModelError::UndeclaredFluent {
                    fluent: f.clone(),
                    context: format!("{part} of action `{}`", self.name),
                });
            }
        }
        if let Some(f) = self.add.intersection(&self.del).next() {
            return Err(ModelError::ConflictingEffects {
                action: self.name.clone(),
                fluent: f.clone(),
            });
        }
        Ok(())
    }
}

/// A grounded planning task: domain (fluents, actions), initial state and goal.
///
/// Actions are keyed by name, so two models with the same content compare
/// equal regardless of declaration order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PlanningModel {
    fluents: BTreeSet<Fluent>,
    actions: BTreeMap<String, ActionSchema>,
    init: State,
    goal: BTreeSet<Fluent>,
}

impl PlanningModel {
    pub fn new(
        fluents: BTreeSet<Fluent>,
        actions: Vec<ActionSchema>,
        init: State,
        goal: BTreeSet<Fluent>,
    ) -> Result<PlanningModel, ModelError> {
        if let Some(f) = fluents.iter().find(|f| !is_valid_name(f)) {
            return Err(ModelError::InvalidName(f.clone()));
        }
        let mut by_name = BTreeMap::new();
        for action in actions {
            action.check(&fluents)?;
            if by_name.contains_key(&action.name) {
                return Err(ModelError::DuplicateAction(action.name));
            }
            by_name.insert(action.name.clone(), action);
        }
        for (context, set) in [("init", &init), ("goal", &goal)] {
            if let Some(f) = set.iter().find(|f| !fluents.contains(*f)) {
                return Err(ModelError::UndeclaredFluent {
                    fluent: f.clone(),
                    context: context.to_string(),
                });
            }
        }
        Ok(PlanningModel {
            fluents,
            actions: by_name,
            init,
            goal,
        })
    }

    pub fn fluents(&self) -> &BTreeSet<Fluent> {
        &self.fluents
    }

    pub fn actions(&self) -> impl ExactSizeIterator<Item = &ActionSchema> {
        self.actions.values()
    }

    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.get(name)
    }

    pub fn init(&self) -> &State {
        &self.init
    }

    pub fn goal(&self) -> &BTreeSet<Fluent> {
        &self.goal
    }

    pub fn goal_holds(&self, state: &State) -> bool {
        self.goal.is_subset(state)
    }

    /// Returns a copy with extra fluent declarations (used to align the
    /// vocabularies of two models).
    pub fn with_fluents<'a>(&self, extra: impl IntoIterator<Item = &'a Fluent>) -> PlanningModel {
        let mut out = self.clone();
        out.fluents.extend(extra.into_iter().cloned());
        out
    }

    // Raw mutators used by the explanation operator, which validates the
    // edit before calling them.
    pub(crate) fn action_mut(&mut self, name: &str) -> Option<&mut ActionSchema> {
        self.actions.get_mut(name)
    }

    pub(crate) fn insert_action(&mut self, action: ActionSchema) {
        self.actions.insert(action.name.clone(), action);
    }

    pub(crate) fn remove_action(&mut self, name: &str) -> Option<ActionSchema> {
        self.actions.remove(name)
    }

    pub(crate) fn init_mut(&mut self) -> &mut State {
        &mut self.init
    }

    pub(crate) fn goal_mut(&mut self) -> &mut BTreeSet<Fluent> {
        &mut self.goal
    }
}

/// An ordered sequence of action names.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
#[serde(transparent)]
pub struct Plan {
    pub steps: Vec<String>,
}

impl Plan {
    pub fn new<I, S>(steps: I) -> Plan
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Plan {
            steps: steps.into_iter().map(Into::into).collect(),
        }
    }

    pub fn empty() -> Plan {
        Plan::default()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Parses one action name per whitespace-separated token; `#` starts a
    /// comment that runs to end of line.
    pub fn parse(text: &str) -> Plan {
        Plan::new(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .flat_map(str::split_whitespace),
        )
    }
}

impl std::fmt::Display for Plan {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}]", self.steps.join(", "))
    }
}

/// Transition function: `(state ∪ add) \ del` when the precondition holds,
/// `None` otherwise.
pub fn apply(state: &State, action: &ActionSchema) -> Option<State> {
    if !action.is_applicable(state) {
        return None;
    }
    let mut next: State = state.union(&action.add).cloned().collect();
    for f in &action.del {
        next.remove(f);
    }
    Some(next)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    /// Index of the first step that could not be applied.
    pub fail_step: Option<usize>,
    /// Set when the failing step names an action the model does not have.
    pub unknown_action: Option<String>,
    pub goal_reached: bool,
    pub traversed_states: Vec<State>,
}

pub fn validate_plan(model: &PlanningModel, plan: &Plan) -> ValidationReport {
    let mut state = model.init().clone();
    let mut traversed = vec![state.clone()];
    for (i, name) in plan.steps.iter().enumerate() {
        let Some(action) = model.action(name) else {
            return ValidationReport {
                valid: false,
                fail_step: Some(i),
                unknown_action: Some(name.clone()),
                goal_reached: false,
                traversed_states: traversed,
            };
        };
        match apply(&state, action) {
            Some(next) => {
                state = next;
                traversed.push(state.clone());
            }
            None => {
                return ValidationReport {
                    valid: false,
                    fail_step: Some(i),
                    unknown_action: None,
                    goal_reached: false,
                    traversed_states: traversed,
                }
            }
        }
    }
    let goal_reached = model.goal_holds(&state);
    ValidationReport {
        valid: goal_reached,
        fail_step: None,
        unknown_action: None,
        goal_reached,
        traversed_states: traversed,
    }
}

/// Sum of action costs for a valid, goal-reaching plan; infinite otherwise.
pub fn plan_cost(model: &PlanningModel, plan: &Plan) -> ExtCost {
    if !validate_plan(model, plan).valid {
        return ExtCost::Infinite;
    }
    ExtCost::Finite(prefix_cost(model, plan, plan.len()))
}

/// Cost of the first `steps` actions of a plan, ignoring applicability.
/// Unknown actions contribute nothing.
pub fn prefix_cost(model: &PlanningModel, plan: &Plan, steps: usize) -> Cost {
    plan.steps
        .iter()
        .take(steps)
        .filter_map(|n| model.action(n))
        .map(|a| a.cost)
        .sum()
}
