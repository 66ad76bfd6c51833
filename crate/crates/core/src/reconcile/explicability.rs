use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::cost::{ExtCost, Score};
use crate::planning::{plan_cost, Plan, SearchLimits};
use crate::reconcile::{Message, ModelPair, ReconcileError};

/// How the distance between a plan and the observer's expectation is
/// measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExplicabilityMetric {
    /// Cost of the plan minus the optimal cost, both in the (explanation
    /// updated) human model.
    #[default]
    HumanModelDiff,
    /// Cost of the plan minus the optimal cost, both in the robot model.
    RobotModelDiff,
}

/// Explicability score of `plan` after the human has received `messages`.
///
/// Zero means the plan is optimal in the evaluating model; a plan that is
/// invalid there scores negative infinity.
pub fn explicability(
    plan: &Plan,
    pair: &ModelPair,
    messages: &BTreeSet<Message>,
    metric: ExplicabilityMetric,
    limits: &SearchLimits,
) -> Result<Score, ReconcileError> {
    let (cost, best) = match metric {
        ExplicabilityMetric::HumanModelDiff => {
            let updated = pair.updated_human(messages)?;
            let cost = plan_cost(&updated, plan);
            if !cost.is_finite() {
                return Ok(Score::NegInfinity);
            }
            (cost, pair.expected_after(messages, limits)?.1)
        }
        ExplicabilityMetric::RobotModelDiff => (plan_cost(pair.robot(), plan), pair.robot_cost()),
    };
    Ok(match cost {
        ExtCost::Finite(c) => Score::Finite(best - c),
        ExtCost::Infinite => Score::NegInfinity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::Cost;
    use crate::reconcile::fixtures::toy_pair;

    #[test]
    fn expected_plan_is_perfectly_explicable() {
        let pair = toy_pair();
        let ex = explicability(
            pair.expected_plan(),
            &pair,
            &BTreeSet::new(),
            ExplicabilityMetric::HumanModelDiff,
            &SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(ex, Score::PERFECT);
    }

    #[test]
    fn plan_invalid_in_human_model_scores_negative_infinity() {
        let pair = toy_pair();
        let ex = explicability(
            pair.robot_plan(),
            &pair,
            &BTreeSet::new(),
            ExplicabilityMetric::HumanModelDiff,
            &SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(ex, Score::NegInfinity);
    }

    #[test]
    fn cost_difference_in_updated_human_model() {
        // After the explanation the human's optimum is fast1+fast2 at 4, so
        // the 7-cost plan scores -3. Enumerating every plan of length <= 5
        // over the three actions confirms 4 is the optimum in that model.
        let pair = toy_pair();
        let full = pair.delta().messages;
        let updated = pair.updated_human(&full).unwrap();
        let names = ["fast1", "fast2", "slow"];
        let mut best: Option<Cost> = None;
        let mut frontier: Vec<Vec<&str>> = vec![vec![]];
        for _ in 0..=5 {
            let mut next = Vec::new();
            for seq in &frontier {
                if let ExtCost::Finite(c) = plan_cost(&updated, &Plan::new(seq.clone())) {
                    best = Some(best.map_or(c, |b| b.min(c)));
                }
                for n in names {
                    let mut s = seq.clone();
                    s.push(n);
                    next.push(s);
                }
            }
            frontier = next;
        }
        assert_eq!(best, Some(Cost::from_int(4)));
        let ex = explicability(
            &Plan::new(["slow"]),
            &pair,
            &full,
            ExplicabilityMetric::HumanModelDiff,
            &SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(ex, Score::Finite(Cost::from_int(-3)));
    }

    #[test]
    fn robot_metric_compares_against_robot_optimum() {
        let pair = toy_pair();
        let ex = explicability(
            &Plan::new(["slow"]),
            &pair,
            &BTreeSet::new(),
            ExplicabilityMetric::RobotModelDiff,
            &SearchLimits::default(),
        )
        .unwrap();
        assert_eq!(ex, Score::Finite(Cost::from_int(-3)));
        let ex = explicability(
            pair.robot_plan(),
            &pair,
            &BTreeSet::new(),
            ExplicabilityMetric::RobotModelDiff,
            &SearchLimits::default(),
        )
        .unwrap();
        assert!(ex.is_perfect());
    }
}
