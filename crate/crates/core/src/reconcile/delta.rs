//! Model differences as atomic explanation messages, and the model-update
//! operator that applies a set of messages to a (human) model.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::cost::Cost;
use crate::planning::{ActionSchema, Fluent, PlanningModel};

/// Role a fluent plays in an action's effects.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EffectKind {
    None,
    Add,
    Del,
}

impl EffectKind {
    fn of(action: &ActionSchema, fluent: &str) -> EffectKind {
        if action.add.contains(fluent) {
            EffectKind::Add
        } else if action.del.contains(fluent) {
            EffectKind::Del
        } else {
            EffectKind::None
        }
    }

    fn label(self) -> &'static str {
        match self {
            EffectKind::None => "none",
            EffectKind::Add => "add",
            EffectKind::Del => "del",
        }
    }
}

/// One atomic piece of model information. Each message edits a single slot
/// of the model (one precondition, one effect entry, one cost, one init or
/// goal fluent, one whole action), so the messages of a delta commute.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Message {
    AddPrecondition {
        action: String,
        fluent: Fluent,
    },
    RemovePrecondition {
        action: String,
        fluent: Fluent,
    },
    SetEffect {
        action: String,
        fluent: Fluent,
        effect: EffectKind,
    },
    SetCost {
        action: String,
        cost: Cost,
    },
    AddInit(Fluent),
    RemoveInit(Fluent),
    AddGoal(Fluent),
    RemoveGoal(Fluent),
    AddAction(ActionSchema),
    RemoveAction(String),
}

impl Message {
    /// Identifies the model slot the message edits.
    fn slot(&self) -> (u8, &str, &str) {
        match self {
            Message::AddPrecondition { action, fluent } | Message::RemovePrecondition { action, fluent } => {
                (0, action, fluent)
            }
            Message::SetEffect { action, fluent, .. } => (1, action, fluent),
            Message::SetCost { action, .. } => (2, action, ""),
            Message::AddInit(f) | Message::RemoveInit(f) => (3, f, ""),
            Message::AddGoal(f) | Message::RemoveGoal(f) => (4, f, ""),
            Message::AddAction(a) => (5, &a.name, ""),
            Message::RemoveAction(a) => (5, a, ""),
        }
    }

    fn target_action(&self) -> Option<&str> {
        match self {
            Message::AddPrecondition { action, .. }
            | Message::RemovePrecondition { action, .. }
            | Message::SetEffect { action, .. }
            | Message::SetCost { action, .. } => Some(action),
            _ => None,
        }
    }
}

impl fmt::Display for Message {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Message::AddPrecondition { action, fluent } => write!(f, "add-pre {action} {fluent}"),
            Message::RemovePrecondition { action, fluent } => write!(f, "remove-pre {action} {fluent}"),
            Message::SetEffect { action, fluent, effect } => {
                write!(f, "set-effect {action} {fluent} {}", effect.label())
            }
            Message::SetCost { action, cost } => write!(f, "set-cost {action} {cost}"),
            Message::AddInit(x) => write!(f, "add-init {x}"),
            Message::RemoveInit(x) => write!(f, "remove-init {x}"),
            Message::AddGoal(x) => write!(f, "add-goal {x}"),
            Message::RemoveGoal(x) => write!(f, "remove-goal {x}"),
            Message::AddAction(a) => write!(f, "add-action {}", a.name),
            Message::RemoveAction(a) => write!(f, "remove-action {a}"),
        }
    }
}

impl Serialize for Message {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplanationError {
    #[error("message `{0}` is not applicable to the model")]
    Inapplicable(String),
    #[error("messages `{0}` and `{1}` edit the same part of the model")]
    Conflicting(String, String),
}

/// Communication cost of each message: a default plus per-message overrides
/// keyed by the message's text form (e.g. `remove-pre take-image soil-sent`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MessageCosts {
    #[serde(default = "one")]
    pub default: Cost,
    #[serde(default)]
    pub overrides: BTreeMap<String, Cost>,
}

fn one() -> Cost {
    Cost::ONE
}

impl Default for MessageCosts {
    fn default() -> Self {
        MessageCosts {
            default: Cost::ONE,
            overrides: BTreeMap::new(),
        }
    }
}

impl MessageCosts {
    pub fn uniform(cost: Cost) -> MessageCosts {
        MessageCosts {
            default: cost,
            overrides: BTreeMap::new(),
        }
    }

    pub fn cost(&self, message: &Message) -> Cost {
        self.overrides
            .get(&message.to_string())
            .copied()
            .unwrap_or(self.default)
    }

    pub fn total<'a>(&self, messages: impl IntoIterator<Item = &'a Message>) -> Cost {
        messages.into_iter().map(|m| self.cost(m)).sum()
    }

    pub fn validate(&self) -> Result<(), String> {
        if !self.default.is_positive() {
            return Err(format!("default message cost must be positive, got {}", self.default));
        }
        if let Some((k, v)) = self.overrides.iter().find(|(_, v)| !v.is_positive()) {
            return Err(format!("message cost for `{k}` must be positive, got {v}"));
        }
        Ok(())
    }
}

/// The set of atomic edits turning the human model into the robot model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelDelta {
    pub messages: BTreeSet<Message>,
    pub costs: MessageCosts,
}

impl ModelDelta {
    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn cost_of<'a>(&self, messages: impl IntoIterator<Item = &'a Message>) -> Cost {
        self.costs.total(messages)
    }
}

/// Computes the unique atomic edit set from `human` to `robot`. Both models
/// are expected to declare the same fluents (see [`crate::reconcile::ModelPair`]).
pub fn diff_models(robot: &PlanningModel, human: &PlanningModel) -> BTreeSet<Message> {
    let mut out = BTreeSet::new();
    for ra in robot.actions() {
        let Some(ha) = human.action(&ra.name) else {
            out.insert(Message::AddAction(ra.clone()));
            continue;
        };
        for f in ra.pre.difference(&ha.pre) {
            out.insert(Message::AddPrecondition {
                action: ra.name.clone(),
                fluent: f.clone(),
            });
        }
        for f in ha.pre.difference(&ra.pre) {
            out.insert(Message::RemovePrecondition {
                action: ra.name.clone(),
                fluent: f.clone(),
            });
        }
        let touched: BTreeSet<&Fluent> = ra.add.iter().chain(&ra.del).chain(&ha.add).chain(&ha.del).collect();
        for f in touched {
            let want = EffectKind::of(ra, f);
            if EffectKind::of(ha, f) != want {
                out.insert(Message::SetEffect {
                    action: ra.name.clone(),
                    fluent: f.clone(),
                    effect: want,
                });
            }
        }
        if ra.cost != ha.cost {
            out.insert(Message::SetCost {
                action: ra.name.clone(),
                cost: ra.cost,
            });
        }
    }
    for ha in human.actions() {
        if robot.action(&ha.name).is_none() {
            out.insert(Message::RemoveAction(ha.name.clone()));
        }
    }
    for f in robot.init().difference(human.init()) {
        out.insert(Message::AddInit(f.clone()));
    }
    for f in human.init().difference(robot.init()) {
        out.insert(Message::RemoveInit(f.clone()));
    }
    for f in robot.goal().difference(human.goal()) {
        out.insert(Message::AddGoal(f.clone()));
    }
    for f in human.goal().difference(robot.goal()) {
        out.insert(Message::RemoveGoal(f.clone()));
    }
    out
}

/// The `+` operator: the model an observer holds after receiving `messages`.
/// Applying the empty set is the identity; the result does not depend on
/// message order.
pub fn apply_explanation<'a>(
    model: &PlanningModel,
    messages: impl IntoIterator<Item = &'a Message>,
) -> Result<PlanningModel, ExplanationError> {
    let messages: Vec<&Message> = messages.into_iter().collect();
    let mut slots: BTreeMap<(u8, &str, &str), &Message> = BTreeMap::new();
    for m in &messages {
        if let Some(prev) = slots.insert(m.slot(), m) {
            if prev != *m {
                return Err(ExplanationError::Conflicting(prev.to_string(), m.to_string()));
            }
        }
    }
    // Whole-action messages must not be combined with edits to that action.
    for m in &messages {
        if let Some(action) = m.target_action() {
            if slots.contains_key(&(5, action, "")) {
                return Err(ExplanationError::Conflicting(
                    slots[&(5, action, "")].to_string(),
                    m.to_string(),
                ));
            }
        }
    }

    let mut out = model.clone();
    for m in slots.values() {
        let inapplicable = || ExplanationError::Inapplicable(m.to_string());
        let declared = |f: &Fluent| model.fluents().contains(f);
        match m {
            Message::AddPrecondition { action, fluent } => {
                let a = out.action_mut(action).ok_or_else(inapplicable)?;
                if !declared(fluent) || !a.pre.insert(fluent.clone()) {
                    return Err(inapplicable());
                }
            }
            Message::RemovePrecondition { action, fluent } => {
                let a = out.action_mut(action).ok_or_else(inapplicable)?;
                if !a.pre.remove(fluent) {
                    return Err(inapplicable());
                }
            }
            Message::SetEffect { action, fluent, effect } => {
                let a = out.action_mut(action).ok_or_else(inapplicable)?;
                if !declared(fluent) || EffectKind::of(a, fluent) == *effect {
                    return Err(inapplicable());
                }
                a.add.remove(fluent);
                a.del.remove(fluent);
                match effect {
                    EffectKind::Add => {
                        a.add.insert(fluent.clone());
                    }
                    EffectKind::Del => {
                        a.del.insert(fluent.clone());
                    }
                    EffectKind::None => {}
                }
            }
            Message::SetCost { action, cost } => {
                let a = out.action_mut(action).ok_or_else(inapplicable)?;
                if a.cost == *cost || cost.is_negative() {
                    return Err(inapplicable());
                }
                a.cost = *cost;
            }
            Message::AddInit(f) => {
                if !declared(f) || !out.init_mut().insert(f.clone()) {
                    return Err(inapplicable());
                }
            }
            Message::RemoveInit(f) => {
                if !out.init_mut().remove(f) {
                    return Err(inapplicable());
                }
            }
            Message::AddGoal(f) => {
                if !declared(f) || !out.goal_mut().insert(f.clone()) {
                    return Err(inapplicable());
                }
            }
            Message::RemoveGoal(f) => {
                if !out.goal_mut().remove(f) {
                    return Err(inapplicable());
                }
            }
            Message::AddAction(schema) => {
                let undeclared = schema
                    .pre
                    .iter()
                    .chain(&schema.add)
                    .chain(&schema.del)
                    .any(|f| !declared(f));
                if out.action(&schema.name).is_some()
                    || undeclared
                    || schema.cost.is_negative()
                    || schema.add.intersection(&schema.del).next().is_some()
                {
                    return Err(inapplicable());
                }
                out.insert_action(schema.clone());
            }
            Message::RemoveAction(name) => {
                out.remove_action(name).ok_or_else(inapplicable)?;
            }
        }
    }
    Ok(out)
}
