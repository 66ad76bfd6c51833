use serde::Serialize;

use crate::cost::Score;
use crate::metamdp::{MetaError, TrustScenario};
use crate::planning::{prefix_cost, Plan};
use crate::reconcile::{StrategyTag, StrategyTriple};
use crate::supervisor::InterventionMap;

const ROW_TOLERANCE: f64 = 1e-9;

/// What the MDP knows about one (level, strategy) action.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActionInfo {
    pub strategy: StrategyTag,
    pub plan: Plan,
    pub explanation_size: usize,
    pub execution_cost: f64,
    pub explicability: Score,
    pub perfectly_explicable: bool,
    /// Probability that a monitoring supervisor keeps their trust level.
    pub response: f64,
    /// Step at which a monitoring supervisor stops the plan.
    pub stop_step: Option<usize>,
    /// Cost incurred when the supervisor monitors.
    pub monitored_cost: f64,
}

/// `transitions[s][a][s']` and `costs[s][a]`, with `actions[a]` naming the
/// strategy behind column `a` (the same at every state).
#[derive(Debug, Clone, PartialEq)]
pub struct TrustMdp {
    pub gamma: f64,
    pub actions: Vec<StrategyTag>,
    pub transitions: Vec<Vec<Vec<f64>>>,
    pub costs: Vec<Vec<f64>>,
    /// Per state and action; empty for MDPs built from raw parts.
    pub info: Vec<Vec<ActionInfo>>,
}

impl TrustMdp {
    /// An MDP from explicit tables, checked for stochastic rows, finite
    /// non-negative costs and a discount in `[0, 1)`.
    pub fn from_parts(
        actions: Vec<StrategyTag>,
        transitions: Vec<Vec<Vec<f64>>>,
        costs: Vec<Vec<f64>>,
        gamma: f64,
    ) -> Result<TrustMdp, MetaError> {
        let mdp = TrustMdp {
            gamma,
            actions,
            transitions,
            costs,
            info: Vec::new(),
        };
        mdp.check()?;
        Ok(mdp)
    }

    pub fn states(&self) -> usize {
        self.costs.len()
    }

    pub fn action_index(&self, tag: StrategyTag) -> Option<usize> {
        self.actions.iter().position(|a| *a == tag)
    }

    pub fn row(&self, state: usize, tag: StrategyTag) -> Option<&[f64]> {
        Some(&self.transitions[state][self.action_index(tag)?])
    }

    fn check(&self) -> Result<(), MetaError> {
        let invalid = |m: String| Err(MetaError::InvalidScenario(m));
        if !(0.0..1.0).contains(&self.gamma) {
            return Err(MetaError::Discount(self.gamma));
        }
        let k = self.costs.len();
        if self.transitions.len() != k {
            return invalid("transition and cost tables disagree on the state count".into());
        }
        for s in 0..k {
            if self.costs[s].len() != self.actions.len() || self.transitions[s].len() != self.actions.len() {
                return invalid(format!("state {} does not have one entry per action", s + 1));
            }
            for (a, row) in self.transitions[s].iter().enumerate() {
                let c = self.costs[s][a];
                if !c.is_finite() {
                    return Err(MetaError::NonFiniteCost {
                        level: s + 1,
                        strategy: self.actions[a],
                    });
                }
                if c < 0.0 {
                    return invalid(format!("negative cost at state {}", s + 1));
                }
                if row.len() != k || row.iter().any(|p| !(0.0..=1.0).contains(p)) {
                    return invalid(format!("malformed transition row at state {}", s + 1));
                }
                if (row.iter().sum::<f64>() - 1.0).abs() > ROW_TOLERANCE {
                    return invalid(format!("transition row at state {} does not sum to 1", s + 1));
                }
            }
        }
        Ok(())
    }
}

/// Builds the decision process from a scenario, the per-level strategy
/// triples and the supervisor's intervention map.
///
/// A perfectly explicable action moves up one level (staying at the top).
/// Any other action moves up with probability `1 - omega`, stays with
/// `omega * P(EX)` and drops with the remainder; the top level folds the
/// upward mass into staying and the bottom level folds the downward mass
/// into staying. The cost is `(1 - omega) * C_e + omega * C_mon`, where the
/// monitored cost is `C_e` for a perfectly explicable plan and otherwise the
/// explanation cost plus the executed prefix up to the stop plus the
/// failure penalty.
pub fn build_mdp(
    scenario: &TrustScenario,
    triples: &[StrategyTriple],
    interventions: &InterventionMap,
) -> Result<TrustMdp, MetaError> {
    scenario.validate()?;
    let k = scenario.k();
    if triples.len() != k {
        return Err(MetaError::TripleCount {
            expected: k,
            got: triples.len(),
        });
    }
    let penalty = scenario.fail_penalty.to_f64();
    let mut transitions = Vec::with_capacity(k);
    let mut costs = Vec::with_capacity(k);
    let mut info = Vec::with_capacity(k);
    for (i, (level, triple)) in scenario.levels.iter().zip(triples).enumerate() {
        let omega = level.omega;
        let up = (i + 1).min(k - 1);
        let down = i.saturating_sub(1);
        let (mut rows, mut row_costs, mut row_info) = (Vec::new(), Vec::new(), Vec::new());
        for &tag in &scenario.strategies {
            let ap = triple.get(tag);
            let ce = ap.execution_cost.finite().ok_or(MetaError::NonFiniteCost {
                level: i + 1,
                strategy: tag,
            })?;
            let ce = ce.to_f64();
            let mut row = vec![0.0; k];
            let perfect = ap.is_perfectly_explicable();
            let response = scenario.response.probability(ap.explicability);
            let stop_step = interventions.get(i + 1, tag).ok_or(MetaError::MissingIntervention {
                level: i + 1,
                strategy: tag,
            })?;
            let monitored_cost = if perfect {
                row[up] = 1.0;
                ce
            } else {
                row[up] += 1.0 - omega;
                row[i] += omega * response;
                row[down] += omega * (1.0 - response);
                let stop = stop_step.ok_or(MetaError::MissingIntervention {
                    level: i + 1,
                    strategy: tag,
                })?;
                (ap.explanation_cost + prefix_cost(level.task.robot(), &ap.plan, stop)).to_f64() + penalty
            };
            row_costs.push((1.0 - omega) * ce + omega * monitored_cost);
            rows.push(row);
            row_info.push(ActionInfo {
                strategy: tag,
                plan: ap.plan.clone(),
                explanation_size: ap.explanation.len(),
                execution_cost: ce,
                explicability: ap.explicability,
                perfectly_explicable: perfect,
                response,
                stop_step,
                monitored_cost,
            });
        }
        transitions.push(rows);
        costs.push(row_costs);
        info.push(row_info);
    }
    let mut mdp = TrustMdp::from_parts(scenario.strategies.clone(), transitions, costs, scenario.gamma)?;
    mdp.info = info;
    Ok(mdp)
}
