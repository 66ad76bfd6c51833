//! Running every condition over many seeds.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::harness::episode::{run_episode, Condition, EpisodeTrace, PolicySource};
use crate::harness::experiment::Experiment;
use crate::harness::stats::{mean, std_dev};
use crate::harness::HarnessError;

/// Per-episode numbers kept for interval estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpisodeMetrics {
    pub seed: u64,
    pub total_cost: f64,
    pub execution_cost: f64,
    pub monitoring_cost: f64,
    pub final_level: usize,
    pub points: i64,
}

impl From<&EpisodeTrace> for EpisodeMetrics {
    fn from(t: &EpisodeTrace) -> Self {
        EpisodeMetrics {
            seed: t.seed,
            total_cost: t.total_cost.to_f64(),
            execution_cost: t.cumulative_execution_cost.to_f64(),
            monitoring_cost: t.cumulative_monitoring_cost.to_f64(),
            final_level: t.final_level(),
            points: t.total_points,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionSummary {
    pub condition: Condition,
    pub episodes: usize,
    pub mean_total_cost: f64,
    pub std_total_cost: f64,
    pub mean_execution_cost: f64,
    pub mean_monitoring_cost: f64,
    pub mean_final_level: f64,
    pub std_final_level: f64,
    pub mean_points: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub scenario: String,
    pub policy_source: PolicySource,
    pub summaries: Vec<ConditionSummary>,
    #[serde(skip)]
    pub episodes: BTreeMap<Condition, Vec<EpisodeMetrics>>,
}

impl Comparison {
    pub fn metric(&self, condition: Condition, f: impl Fn(&EpisodeMetrics) -> f64) -> Vec<f64> {
        self.episodes
            .get(&condition)
            .map_or_else(Vec::new, |e| e.iter().map(f).collect())
    }

    pub fn summary(&self, condition: Condition) -> Option<&ConditionSummary> {
        self.summaries.iter().find(|s| s.condition == condition)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "condition,episodes,mean_total_cost,std_total_cost,mean_execution_cost,mean_monitoring_cost,mean_final_level,std_final_level,mean_points\n",
        );
        for s in &self.summaries {
            out.push_str(&format!(
                "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}\n",
                s.condition,
                s.episodes,
                s.mean_total_cost,
                s.std_total_cost,
                s.mean_execution_cost,
                s.mean_monitoring_cost,
                s.mean_final_level,
                s.std_final_level,
                s.mean_points
            ));
        }
        out
    }

    /// Per-episode rows for plotting.
    pub fn plot_data(&self) -> String {
        let mut out = String::from("condition,seed,total_cost,final_level,points\n");
        for (c, eps) in &self.episodes {
            for e in eps {
                out.push_str(&format!(
                    "{c},{},{},{},{}\n",
                    e.seed, e.total_cost, e.final_level, e.points
                ));
            }
        }
        out
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "scenario {} (policy {})", self.scenario, self.policy_source)?;
        writeln!(
            f,
            "{:<18} {:>8} {:>22} {:>12} {:>12} {:>18} {:>10}",
            "condition", "episodes", "total cost", "execution", "monitoring", "final level", "points"
        )?;
        for s in &self.summaries {
            writeln!(
                f,
                "{:<18} {:>8} {:>11.3} ± {:>8.3} {:>12.3} {:>12.3} {:>7.3} ± {:>6.3} {:>10.1}",
                s.condition.to_string(),
                s.episodes,
                s.mean_total_cost,
                s.std_total_cost,
                s.mean_execution_cost,
                s.mean_monitoring_cost,
                s.mean_final_level,
                s.std_final_level,
                s.mean_points
            )?;
        }
        Ok(())
    }
}

pub fn run_condition(
    exp: &Experiment,
    condition: Condition,
    seeds: &[u64],
    source: PolicySource,
) -> Result<Vec<EpisodeTrace>, HarnessError> {
    seeds
        .par_iter()
        .map(|&s| run_episode(exp, condition, s, source))
        .collect()
}

/// Mean and spread of cost and final trust for each condition over `seeds`.
pub fn compare_conditions(
    exp: &Experiment,
    conditions: &[Condition],
    seeds: &[u64],
    source: PolicySource,
) -> Result<Comparison, HarnessError> {
    let mut episodes = BTreeMap::new();
    let mut summaries = Vec::new();
    for &c in conditions {
        let metrics: Vec<EpisodeMetrics> = run_condition(exp, c, seeds, source)?
            .iter()
            .map(EpisodeMetrics::from)
            .collect();
        let col = |f: fn(&EpisodeMetrics) -> f64| metrics.iter().map(f).collect::<Vec<_>>();
        let total = col(|m| m.total_cost);
        let level = col(|m| m.final_level as f64);
        summaries.push(ConditionSummary {
            condition: c,
            episodes: metrics.len(),
            mean_total_cost: mean(&total),
            std_total_cost: std_dev(&total),
            mean_execution_cost: mean(&col(|m| m.execution_cost)),
            mean_monitoring_cost: mean(&col(|m| m.monitoring_cost)),
            mean_final_level: mean(&level),
            std_final_level: std_dev(&level),
            mean_points: mean(&col(|m| m.points as f64)),
        });
        episodes.insert(c, metrics);
    }
    Ok(Comparison {
        scenario: exp.scenario.name.clone(),
        policy_source: source,
        summaries,
        episodes,
    })
}
