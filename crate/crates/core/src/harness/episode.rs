//! Longitudinal simulation of one supervisor over a sequence of rounds.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::harness::experiment::Experiment;
use crate::harness::scoring::{score_round, total, Choice, PointEntry, RoundResult};
use crate::harness::HarnessError;
use crate::metamdp::MetaPolicy;
use crate::planning::{prefix_cost, Plan};
use crate::reconcile::StrategyTag;
use crate::supervisor::{estimate_omega, monitor_decision, sample_trust_transition, SupervisorState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Condition {
    TrustAware,
    AlwaysExplicable,
    AlwaysOptimal,
    /// Explicable or optimal with equal probability each round.
    Random,
}

impl Condition {
    pub const ALL: [Condition; 4] = [
        Condition::TrustAware,
        Condition::AlwaysExplicable,
        Condition::AlwaysOptimal,
        Condition::Random,
    ];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Condition::TrustAware => "trust-aware",
            Condition::AlwaysExplicable => "always-explicable",
            Condition::AlwaysOptimal => "always-optimal",
            Condition::Random => "random",
        })
    }
}

impl FromStr for Condition {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Condition::ALL
            .into_iter()
            .find(|c| c.to_string() == s)
            .ok_or_else(|| format!("unknown condition `{s}`"))
    }
}

/// Where the trust-aware condition gets its policy from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicySource {
    /// The policy solved once for the configured scenario.
    #[default]
    Fixed,
    /// Re-solved after every round with monitoring probabilities estimated
    /// from the rounds seen so far.
    Recomputed,
}

impl fmt::Display for PolicySource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicySource::Fixed => "fixed",
            PolicySource::Recomputed => "recomputed",
        })
    }
}

impl FromStr for PolicySource {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fixed" => Ok(PolicySource::Fixed),
            "recomputed" => Ok(PolicySource::Recomputed),
            other => Err(format!("unknown policy source `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundOutcome {
    pub round: usize,
    pub level: usize,
    pub task: String,
    pub strategy: StrategyTag,
    pub plan: Plan,
    pub monitored: bool,
    pub stopped_at: Option<usize>,
    pub goal_reached: bool,
    pub realized_cost: Cost,
    pub monitoring_cost: Cost,
    pub next_level: usize,
    pub choice: Choice,
    pub points: Vec<PointEntry>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrustPoint {
    pub scalar: f64,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpisodeTrace {
    pub scenario: String,
    pub condition: Condition,
    pub policy_source: PolicySource,
    pub seed: u64,
    pub rounds: Vec<RoundOutcome>,
    pub cumulative_execution_cost: Cost,
    pub cumulative_monitoring_cost: Cost,
    pub total_cost: Cost,
    pub total_points: i64,
    /// Trust after each round.
    pub trajectory: Vec<TrustPoint>,
}

impl EpisodeTrace {
    pub fn final_level(&self) -> usize {
        self.trajectory.last().map_or(0, |t| t.level)
    }
}

/// Pool-adjacent-violators projection onto non-increasing sequences.
pub(crate) fn non_increasing(values: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        blocks.push((v, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if a >= b {
                break;
            }
            blocks.pop();
            let n = na + nb;
            *blocks.last_mut().unwrap() = ((a * na as f64 + b * nb as f64) / n as f64, n);
        }
    }
    blocks
        .into_iter()
        .flat_map(|(v, n)| std::iter::repeat_n(v, n))
        .collect()
}

/// Simulates `rounds` rounds under one condition; deterministic for a seed.
///
/// A round picks the strategy for the current level's task, draws whether
/// the supervisor monitors, stops imperfect plans at the intervention step
/// when monitored, and samples the next trust level.
pub fn run_episode(
    exp: &Experiment,
    condition: Condition,
    seed: u64,
    source: PolicySource,
) -> Result<EpisodeTrace, HarnessError> {
    let cfg = &exp.loaded.config;
    let scenario = &exp.scenario;
    let k = scenario.k();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = SupervisorState::at_level(cfg.initial_level, k);
    let mut policy: MetaPolicy = exp.policy.clone();
    let mut observations: Vec<(usize, bool)> = Vec::new();
    let mut rounds = Vec::with_capacity(cfg.rounds);
    let mut trajectory = Vec::with_capacity(cfg.rounds);
    let penalty = scenario.fail_penalty;
    for round in 1..=cfg.rounds {
        let level = state.trust_level;
        let i = level - 1;
        let strategy = match condition {
            Condition::TrustAware => policy.choice[i],
            Condition::AlwaysExplicable => StrategyTag::Explicable,
            Condition::AlwaysOptimal => StrategyTag::Optimal,
            Condition::Random => {
                if rng.random_bool(0.5) {
                    StrategyTag::Explicable
                } else {
                    StrategyTag::Optimal
                }
            }
        };
        let ap = exp.triples[i].get(strategy);
        let monitored = monitor_decision(level, scenario, &mut rng);
        let stopped_at = if monitored {
            exp.interventions
                .get(level, strategy)
                .ok_or_else(|| HarnessError::Invalid(format!("no intervention entry for level {level}")))?
        } else {
            None
        };
        let goal_reached = stopped_at.is_none();
        let realized_cost = match stopped_at {
            Some(stop) => ap.explanation_cost + prefix_cost(scenario.levels[i].task.robot(), &ap.plan, stop) + penalty,
            None => ap.execution_cost.finite().ok_or_else(|| {
                HarnessError::Invalid(format!("strategy {strategy} at level {level} has no valid plan"))
            })?,
        };
        let next = sample_trust_transition(level, ap, monitored, stopped_at.is_some(), scenario, &mut rng)?;
        let choice = if monitored { Choice::Monitor } else { Choice::Label };
        let points = score_round(
            choice,
            RoundResult {
                stopped: stopped_at.is_some(),
                goal_reached,
            },
            &cfg.scoring,
        )?;
        rounds.push(RoundOutcome {
            round,
            level,
            task: scenario.levels[i].task_name.clone(),
            strategy,
            plan: ap.plan.clone(),
            monitored,
            stopped_at,
            goal_reached,
            realized_cost,
            monitoring_cost: if monitored {
                cfg.monitoring_cost_per_round
            } else {
                Cost::ZERO
            },
            next_level: next,
            choice,
            points,
        });
        state.move_to(next);
        trajectory.push(TrustPoint {
            scalar: state.trust_scalar,
            level: state.trust_level,
        });
        if condition == Condition::TrustAware && source == PolicySource::Recomputed {
            observations.push((level, monitored));
            policy = exp.resolve_with_omega(&estimated_omega(exp, &observations))?;
        }
    }
    let cumulative_execution_cost: Cost = rounds.iter().map(|r| r.realized_cost).sum();
    let cumulative_monitoring_cost: Cost = rounds.iter().map(|r| r.monitoring_cost).sum();
    Ok(EpisodeTrace {
        scenario: scenario.name.clone(),
        condition,
        policy_source: source,
        seed,
        total_points: rounds.iter().map(|r| total(&r.points)).sum(),
        rounds,
        cumulative_execution_cost,
        cumulative_monitoring_cost,
        total_cost: cumulative_execution_cost + cumulative_monitoring_cost,
        trajectory,
    })
}

/// Posterior-mean monitoring probabilities with a Beta prior of strength 2
/// centred on the configured values, projected to be non-increasing.
pub(crate) fn estimated_omega(exp: &Experiment, observations: &[(usize, bool)]) -> Vec<f64> {
    let k = exp.k();
    let counts = estimate_omega(observations.iter().copied(), 1.0, k).counts;
    let raw: Vec<f64> = counts
        .iter()
        .zip(exp.scenario.omegas())
        .map(|(&(m, n), prior)| (m as f64 + 2.0 * prior) / (n as f64 + 2.0))
        .collect();
    non_increasing(&raw).into_iter().map(|w| w.clamp(0.0, 1.0)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_pools_violators() {
        assert_eq!(non_increasing(&[0.9, 0.5, 0.7, 0.1]), vec![0.9, 0.6, 0.6, 0.1]);
        assert_eq!(
            non_increasing(&[0.2, 0.4]),
            vec![0.30000000000000004, 0.30000000000000004]
        );
        assert_eq!(non_increasing(&[1.0, 0.5]), vec![1.0, 0.5]);
    }

    #[test]
    fn condition_names_round_trip() {
        for c in Condition::ALL {
            assert_eq!(c.to_string().parse::<Condition>(), Ok(c));
        }
        assert!("sometimes".parse::<Condition>().is_err());
    }
}
