use std::fmt;

use serde::Serialize;

use crate::cost::Score;
use crate::metamdp::{MetaPolicy, TrustMdp, TrustScenario};
use crate::planning::Plan;
use crate::reconcile::StrategyTag;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportAction {
    pub strategy: StrategyTag,
    pub plan: Plan,
    pub explanation_size: usize,
    pub execution_cost: f64,
    pub explicability: Score,
    pub stop_step: Option<usize>,
    pub cost: f64,
    pub transitions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportState {
    pub level: usize,
    pub anchor: f64,
    pub omega: f64,
    pub task: String,
    pub actions: Vec<ReportAction>,
}

/// Deterministic dump of a built MDP and its solved policy.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MdpReport {
    pub scenario: String,
    pub gamma: f64,
    pub states: Vec<ReportState>,
    pub policy: MetaPolicy,
}

impl MdpReport {
    pub fn new(scenario: &TrustScenario, mdp: &TrustMdp, policy: &MetaPolicy) -> MdpReport {
        let states = scenario
            .levels
            .iter()
            .enumerate()
            .map(|(s, level)| ReportState {
                level: s + 1,
                anchor: level.anchor,
                omega: level.omega,
                task: level.task_name.clone(),
                actions: mdp.info[s]
                    .iter()
                    .enumerate()
                    .map(|(a, info)| ReportAction {
                        strategy: info.strategy,
                        plan: info.plan.clone(),
                        explanation_size: info.explanation_size,
                        execution_cost: info.execution_cost,
                        explicability: info.explicability,
                        stop_step: info.stop_step,
                        cost: mdp.costs[s][a],
                        transitions: mdp.transitions[s][a].clone(),
                    })
                    .collect(),
            })
            .collect();
        MdpReport {
            scenario: scenario.name.clone(),
            gamma: mdp.gamma,
            states,
            policy: policy.clone(),
        }
    }
}

impl fmt::Display for MdpReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {}", self.scenario)?;
        writeln!(f, "gamma {:.4}", self.gamma)?;
        for s in &self.states {
            writeln!(
                f,
                "level {} anchor {:.4} omega {:.4} task {}",
                s.level, s.anchor, s.omega, s.task
            )?;
            for a in &s.actions {
                let stop = a.stop_step.map_or("-".to_string(), |x| x.to_string());
                let row: Vec<String> = a.transitions.iter().map(|p| format!("{p:.6}")).collect();
                writeln!(
                    f,
                    "  {} C_e {:.4} EX {} stop {} cost {:.6} P [{}] plan {} explanation {}",
                    a.strategy.short(),
                    a.execution_cost,
                    a.explicability,
                    stop,
                    a.cost,
                    row.join(" "),
                    a.plan,
                    a.explanation_size
                )?;
            }
        }
        writeln!(f, "policy {}", self.policy.short())?;
        let values: Vec<String> = self.policy.value.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(f, "value [{}]", values.join(" "))?;
        let reported: Vec<String> = self.policy.reported_value.iter().map(|v| format!("{v:.6}")).collect();
        write!(f, "reported_value [{}]", reported.join(" "))
    }
}
