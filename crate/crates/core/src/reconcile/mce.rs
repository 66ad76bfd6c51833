//! Minimally complete explanations by exhaustive search over the subset
//! lattice of the model delta.

use std::collections::{BTreeSet, HashMap};

use crate::cost::{Cost, ExtCost};
use crate::planning::{optimal_plan, plan_cost, Plan, PlanningModel, SearchLimits};
use crate::reconcile::{Message, ModelPair, ReconcileError};

pub const DEFAULT_MCE_CAP: usize = 16;

#[derive(Debug, Clone)]
pub struct MceOptions {
    /// Largest delta the exhaustive search will accept.
    pub cap: usize,
    pub limits: SearchLimits,
}

impl Default for MceOptions {
    fn default() -> Self {
        MceOptions {
            cap: DEFAULT_MCE_CAP,
            limits: SearchLimits::default(),
        }
    }
}

/// Subsets of the delta addressed by bitmask, with per-subset memoization of
/// the updated human model and its optimal cost.
pub(crate) struct Lattice<'a> {
    pair: &'a ModelPair,
    pub messages: Vec<Message>,
    models: HashMap<u32, PlanningModel>,
    optima: HashMap<u32, Cost>,
}

impl<'a> Lattice<'a> {
    pub fn new(pair: &'a ModelPair, cap: usize) -> Result<Lattice<'a>, ReconcileError> {
        let messages: Vec<Message> = pair.delta().messages.into_iter().collect();
        if messages.len() > cap || messages.len() > 31 {
            return Err(ReconcileError::DeltaTooLarge {
                size: messages.len(),
                cap: cap.min(31),
            });
        }
        Ok(Lattice {
            pair,
            messages,
            models: HashMap::new(),
            optima: HashMap::new(),
        })
    }

    pub fn size(&self) -> usize {
        self.messages.len()
    }

    pub fn subset(&self, mask: u32) -> BTreeSet<Message> {
        self.members(mask).cloned().collect()
    }

    fn members(&self, mask: u32) -> impl Iterator<Item = &Message> {
        self.messages
            .iter()
            .enumerate()
            .filter(move |(i, _)| mask & (1 << i) != 0)
            .map(|(_, m)| m)
    }

    pub fn cost(&self, mask: u32) -> Cost {
        self.pair.message_costs().total(self.members(mask))
    }

    pub fn model(&mut self, mask: u32) -> Result<&PlanningModel, ReconcileError> {
        if !self.models.contains_key(&mask) {
            let m = self.pair.updated_human(self.members(mask))?;
            self.models.insert(mask, m);
        }
        Ok(&self.models[&mask])
    }

    pub fn optimum(&mut self, mask: u32, limits: &SearchLimits) -> Result<Cost, ReconcileError> {
        if let Some(c) = self.optima.get(&mask) {
            return Ok(*c);
        }
        let c = if mask == 0 {
            self.pair.expected_cost()
        } else {
            let model = self.model(mask)?;
            let plan = optimal_plan(model, limits).map_err(ReconcileError::UpdatedHuman)?;
            plan_cost(model, &plan).finite().expect("optimal plan is valid")
        };
        self.optima.insert(mask, c);
        Ok(c)
    }

    /// Cost of `plan` in the human model updated by `mask`.
    pub fn plan_cost(&mut self, mask: u32, plan: &Plan) -> Result<ExtCost, ReconcileError> {
        Ok(plan_cost(self.model(mask)?, plan))
    }

    /// True if `plan` is valid and optimal in the updated human model.
    pub fn plan_is_optimal(&mut self, mask: u32, plan: &Plan, limits: &SearchLimits) -> Result<bool, ReconcileError> {
        match self.plan_cost(mask, plan)? {
            ExtCost::Infinite => Ok(false),
            ExtCost::Finite(c) => Ok(c == self.optimum(mask, limits)?),
        }
    }
}

/// Smallest explanation after which the human considers `plan` optimal.
///
/// Minimum cardinality first; ties go to the lowest total message cost, then
/// to the lexicographically smallest message list.
pub fn mce(pair: &ModelPair, plan: &Plan, opts: &MceOptions) -> Result<BTreeSet<Message>, ReconcileError> {
    match plan_cost(pair.robot(), plan) {
        ExtCost::Finite(c) if c == pair.robot_cost() => {}
        _ => return Err(ReconcileError::NotRobotOptimal(plan.to_string())),
    }
    let mut lattice = Lattice::new(pair, opts.cap)?;
    mce_in(&mut lattice, plan, &opts.limits)
}

pub(crate) fn mce_in(
    lattice: &mut Lattice<'_>,
    plan: &Plan,
    limits: &SearchLimits,
) -> Result<BTreeSet<Message>, ReconcileError> {
    let n = lattice.size() as u32;
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    for size in 0..=n {
        let mut best: Option<(Cost, Vec<Message>)> = None;
        for mask in (0..=full).filter(|m| m.count_ones() == size) {
            if !lattice.plan_is_optimal(mask, plan, limits)? {
                continue;
            }
            let key = (lattice.cost(mask), lattice.subset(mask).into_iter().collect::<Vec<_>>());
            if best.as_ref().is_none_or(|b| key < *b) {
                best = Some(key);
            }
        }
        if let Some((_, msgs)) = best {
            return Ok(msgs.into_iter().collect());
        }
    }
    // The full delta turns the human model into the robot model, in which the
    // plan is optimal by precondition.
    unreachable!("full delta always makes a robot-optimal plan optimal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::parse_model;
    use crate::reconcile::fixtures::toy_pair;
    use crate::reconcile::MessageCosts;

    #[test]
    fn already_optimal_plan_needs_no_explanation() {
        let robot = parse_model("fluents: g\naction a cost 1 add {g}\ninit {}\ngoal {g}").unwrap();
        let human = parse_model("fluents: g h\naction a cost 1 add {g}\ninit {h}\ngoal {g}").unwrap();
        let pair = ModelPair::new(robot, human, MessageCosts::default(), &SearchLimits::default()).unwrap();
        assert_eq!(pair.delta().len(), 1);
        assert!(mce(&pair, pair.robot_plan(), &MceOptions::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn single_flipping_message_is_the_mce() {
        let pair = toy_pair();
        let e = mce(&pair, pair.robot_plan(), &MceOptions::default()).unwrap();
        assert_eq!(e, pair.delta().messages);
        assert_eq!(e.len(), 1);
    }

    #[test]
    fn cap_and_precondition_errors() {
        let pair = toy_pair();
        let opts = MceOptions {
            cap: 0,
            ..MceOptions::default()
        };
        assert_eq!(
            mce(&pair, pair.robot_plan(), &opts),
            Err(ReconcileError::DeltaTooLarge { size: 1, cap: 0 })
        );
        assert!(matches!(
            mce(&pair, &Plan::new(["slow"]), &MceOptions::default()),
            Err(ReconcileError::NotRobotOptimal(_))
        ));
    }

    #[test]
    fn irrelevant_differences_are_left_out() {
        let robot = parse_model(
            "fluents: s m g p q
             action slow cost 7 pre {s} add {g} del {s}
             action f1 cost 2 pre {s} add {m} del {s}
             action f2 cost 2 pre {m} add {g} del {m}
             action noise cost 3 pre {q} add {p}
             init {s}
             goal {g}",
        )
        .unwrap();
        let human = parse_model(
            "fluents: s m g p q
             action slow cost 7 pre {s} add {g} del {s}
             action f1 cost 2 pre {s} add {m} del {s}
             action f2 cost 2 pre {m p} add {g} del {m}
             action noise cost 9 pre {} add {p}
             init {s}
             goal {g}",
        )
        .unwrap();
        let pair = ModelPair::new(robot, human, MessageCosts::default(), &SearchLimits::default()).unwrap();
        assert_eq!(pair.delta().len(), 3);
        let e = mce(&pair, pair.robot_plan(), &MceOptions::default()).unwrap();
        assert_eq!(
            e.into_iter().collect::<Vec<_>>(),
            vec![Message::RemovePrecondition {
                action: "f2".into(),
                fluent: "p".into()
            }]
        );
    }
}
