//! Human-aware planning over a (robot model, human mental model) pair:
//! model differences, explanations, explicability scoring, minimally
//! complete explanations and the per-task strategy triple.

mod delta;
mod explicability;
mod mce;
mod strategy;

use std::collections::BTreeSet;

pub use delta::{apply_explanation, diff_models, EffectKind, ExplanationError, Message, MessageCosts, ModelDelta};
pub use explicability::{explicability, ExplicabilityMetric};
pub use mce::{mce, MceOptions, DEFAULT_MCE_CAP};
pub use strategy::{strategy_triple, AnnotatedPlan, StrategyOptions, StrategyTag, StrategyTriple};

use crate::cost::Cost;
use crate::planning::{optimal_plan, plan_cost, Plan, PlanningModel, SearchError, SearchLimits};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReconcileError {
    #[error("robot model: {0}")]
    Robot(SearchError),
    #[error("human model: {0}")]
    Human(SearchError),
    #[error("updated human model: {0}")]
    UpdatedHuman(SearchError),
    #[error(transparent)]
    Explanation(#[from] ExplanationError),
    #[error("model delta has {size} messages, above the explanation search cap of {cap}")]
    DeltaTooLarge { size: usize, cap: usize },
    #[error("plan {0} is not optimal in the robot model")]
    NotRobotOptimal(String),
    #[error("invalid message costs: {0}")]
    MessageCosts(String),
}

/// A robot task model together with the human's model of the same task.
///
/// On construction both models are given the union of their fluent
/// declarations, and the plan the human expects (optimal in the human model)
/// and the robot's own optimal plan are computed once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelPair {
    robot: PlanningModel,
    human: PlanningModel,
    costs: MessageCosts,
    expected_plan: Plan,
    expected_cost: Cost,
    robot_plan: Plan,
    robot_cost: Cost,
}

impl ModelPair {
    pub fn new(
        robot: PlanningModel,
        human: PlanningModel,
        costs: MessageCosts,
        limits: &SearchLimits,
    ) -> Result<ModelPair, ReconcileError> {
        costs.validate().map_err(ReconcileError::MessageCosts)?;
        let robot_aligned = robot.with_fluents(human.fluents());
        let human_aligned = human.with_fluents(robot.fluents());
        let expected_plan = optimal_plan(&human_aligned, limits).map_err(ReconcileError::Human)?;
        let robot_plan = optimal_plan(&robot_aligned, limits).map_err(ReconcileError::Robot)?;
        let expected_cost = plan_cost(&human_aligned, &expected_plan)
            .finite()
            .expect("optimal plan is valid");
        let robot_cost = plan_cost(&robot_aligned, &robot_plan)
            .finite()
            .expect("optimal plan is valid");
        Ok(ModelPair {
            robot: robot_aligned,
            human: human_aligned,
            costs,
            expected_plan,
            expected_cost,
            robot_plan,
            robot_cost,
        })
    }

    pub fn robot(&self) -> &PlanningModel {
        &self.robot
    }

    pub fn human(&self) -> &PlanningModel {
        &self.human
    }

    pub fn message_costs(&self) -> &MessageCosts {
        &self.costs
    }

    /// The plan the human expects: optimal in the human model.
    pub fn expected_plan(&self) -> &Plan {
        &self.expected_plan
    }

    pub fn expected_cost(&self) -> Cost {
        self.expected_cost
    }

    /// The robot's optimal plan in its own model.
    pub fn robot_plan(&self) -> &Plan {
        &self.robot_plan
    }

    pub fn robot_cost(&self) -> Cost {
        self.robot_cost
    }

    pub fn delta(&self) -> ModelDelta {
        ModelDelta {
            messages: diff_models(&self.robot, &self.human),
            costs: self.costs.clone(),
        }
    }

    /// The human model after receiving `messages`.
    pub fn updated_human<'a>(
        &self,
        messages: impl IntoIterator<Item = &'a Message>,
    ) -> Result<PlanningModel, ReconcileError> {
        Ok(apply_explanation(&self.human, messages)?)
    }

    /// The plan the human would expect after receiving `messages`, with its
    /// cost in the updated model.
    pub fn expected_after(
        &self,
        messages: &BTreeSet<Message>,
        limits: &SearchLimits,
    ) -> Result<(Plan, Cost), ReconcileError> {
        if messages.is_empty() {
            return Ok((self.expected_plan.clone(), self.expected_cost));
        }
        let updated = self.updated_human(messages)?;
        let plan = optimal_plan(&updated, limits).map_err(ReconcileError::UpdatedHuman)?;
        let cost = plan_cost(&updated, &plan).finite().expect("optimal plan is valid");
        Ok((plan, cost))
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::planning::parse_model;

    #[test]
    fn pair_aligns_vocabulary_and_memoizes_plans() {
        let pair = fixtures::toy_pair();
        assert_eq!(pair.expected_plan(), &Plan::new(["slow"]));
        assert_eq!(pair.expected_cost(), Cost::from_int(7));
        assert_eq!(pair.robot_plan(), &Plan::new(["fast1", "fast2"]));
        assert_eq!(pair.robot_cost(), Cost::from_int(4));
        assert_eq!(pair.delta().len(), 1);
        let full = pair.updated_human(&pair.delta().messages).unwrap();
        assert_eq!(&full, pair.robot());
    }

    #[test]
    fn robot_only_fluents_are_declared_in_both() {
        let robot = parse_model("fluents: g extra\naction a cost 1 add {g}\ninit {}\ngoal {g}").unwrap();
        let human = parse_model("fluents: g\naction a cost 1 add {g}\ninit {}\ngoal {g}").unwrap();
        let pair = ModelPair::new(robot, human, MessageCosts::default(), &SearchLimits::default()).unwrap();
        assert!(pair.human().fluents().contains("extra"));
        assert!(pair.delta().is_empty());
    }

    #[test]
    fn unsolvable_human_model_is_rejected() {
        let robot = parse_model("fluents: g\naction a cost 1 add {g}\ninit {}\ngoal {g}").unwrap();
        let human = parse_model("fluents: g\ninit {}\ngoal {g}").unwrap();
        let err = ModelPair::new(
            robot.clone(),
            human.clone(),
            MessageCosts::default(),
            &SearchLimits::default(),
        )
        .unwrap_err();
        assert_eq!(err, ReconcileError::Human(SearchError::Unsolvable));
        let err = ModelPair::new(human, robot, MessageCosts::default(), &SearchLimits::default()).unwrap_err();
        assert_eq!(err, ReconcileError::Robot(SearchError::Unsolvable));
    }
}
