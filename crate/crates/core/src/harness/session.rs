//! The live study round loop as a pure state machine.
//!
//! Each round: the supervisor chooses to monitor or label; a monitoring
//! supervisor is shown the plan step by step and may stop it; the round's
//! points are settled; a trust questionnaire sets the next level, whose
//! curriculum task is played next.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::harness::episode::{estimated_omega, Condition, PolicySource};
use crate::harness::experiment::Experiment;
use crate::harness::scoring::{score_round, total, Choice, PointEntry, RoundResult, ScoringTable};
use crate::reconcile::StrategyTag;
use crate::supervisor::{level_midpoint, Questionnaire};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    AwaitChoice,
    Watching,
    AwaitQuestionnaire,
    Done,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SessionError {
    #[error("{action} is not allowed while the session is in phase {phase:?}")]
    Conflict { action: &'static str, phase: Phase },
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Validation(String),
}

/// One event, recorded in the session log as `{kind, payload}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub round: usize,
    pub kind: &'static str,
    pub payload: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundRecord {
    pub round: usize,
    pub level: usize,
    pub task: String,
    pub strategy: StrategyTag,
    pub choice: Option<Choice>,
    pub steps_shown: usize,
    pub stopped_at: Option<usize>,
    pub goal_reached: Option<bool>,
    pub points: Vec<PointEntry>,
    pub ratings: Option<Questionnaire>,
}

#[derive(Debug, Clone)]
pub struct Session {
    pub id: String,
    pub condition: Condition,
    pub phase: Phase,
    pub level: usize,
    pub trust_scalar: f64,
    pub rounds: Vec<RoundRecord>,
    policy: Vec<StrategyTag>,
    observations: Vec<(usize, bool)>,
    rng: ChaCha8Rng,
}

/// What the participant may see about the current round. Only the human
/// view of the task is exposed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundView {
    pub session: String,
    pub round: usize,
    pub rounds: usize,
    pub phase: Phase,
    pub level: usize,
    pub task: String,
    pub map: Option<String>,
    pub plan_length: usize,
    pub steps_shown: usize,
    pub points: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepView {
    /// 1-based step number.
    pub step: usize,
    pub action: String,
    /// Robot cell on the human map after the step, when the task has a map.
    pub position: Option<(usize, usize)>,
    pub last: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SessionSummary {
    pub session: String,
    pub condition: Condition,
    pub phase: Phase,
    pub level: usize,
    pub trust_scalar: f64,
    pub points: i64,
    pub rounds: Vec<RoundRecord>,
}

impl Session {
    /// A new session at the configured initial level, with round 1 started.
    pub fn create(id: String, condition: Condition, seed: u64, exp: &Experiment) -> (Session, Vec<Event>) {
        let level = exp.loaded.config.initial_level;
        let mut s = Session {
            id,
            condition,
            phase: Phase::AwaitChoice,
            level,
            trust_scalar: level_midpoint(level, exp.k()),
            rounds: Vec::new(),
            policy: exp.policy.choice.clone(),
            observations: Vec::new(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        let created = Event {
            round: 1,
            kind: "created",
            payload: json!({
                "condition": condition,
                "seed": seed,
                "rounds": exp.loaded.config.rounds,
                "level": level,
                "scoring": exp.loaded.config.scoring,
            }),
        };
        let started = s.start_round(exp);
        (s, vec![created, started])
    }

    fn round_no(&self) -> usize {
        self.rounds.len()
    }

    fn current(&self) -> &RoundRecord {
        self.rounds.last().expect("a round is always started")
    }

    fn current_mut(&mut self) -> &mut RoundRecord {
        self.rounds.last_mut().expect("a round is always started")
    }

    fn start_round(&mut self, exp: &Experiment) -> Event {
        let i = self.level - 1;
        let strategy = match self.condition {
            Condition::TrustAware => self.policy[i],
            Condition::AlwaysExplicable => StrategyTag::Explicable,
            Condition::AlwaysOptimal => StrategyTag::Optimal,
            Condition::Random => {
                if self.rng.random_bool(0.5) {
                    StrategyTag::Explicable
                } else {
                    StrategyTag::Optimal
                }
            }
        };
        let task = exp.scenario.levels[i].task_name.clone();
        self.rounds.push(RoundRecord {
            round: self.rounds.len() + 1,
            level: self.level,
            task: task.clone(),
            strategy,
            choice: None,
            steps_shown: 0,
            stopped_at: None,
            goal_reached: None,
            points: Vec::new(),
            ratings: None,
        });
        self.phase = Phase::AwaitChoice;
        Event {
            round: self.round_no(),
            kind: "round-started",
            payload: json!({"level": self.level, "task": task, "strategy": strategy}),
        }
    }

    fn plan_len(&self, exp: &Experiment) -> usize {
        let r = self.current();
        exp.triples[r.level - 1].get(r.strategy).plan.len()
    }

    pub fn points(&self) -> i64 {
        self.rounds.iter().map(|r| total(&r.points)).sum()
    }

    fn conflict(&self, action: &'static str) -> SessionError {
        SessionError::Conflict {
            action,
            phase: self.phase,
        }
    }

    fn settle(&mut self, stopped: bool, table: &ScoringTable) -> Result<Event, SessionError> {
        let choice = self.current().choice.expect("choice made before settling");
        let result = RoundResult {
            stopped,
            goal_reached: !stopped,
        };
        let points = score_round(choice, result, table).map_err(|e| SessionError::Validation(e.to_string()))?;
        let r = self.current_mut();
        r.goal_reached = Some(result.goal_reached);
        r.points = points.clone();
        self.phase = Phase::AwaitQuestionnaire;
        Ok(Event {
            round: self.round_no(),
            kind: "outcome",
            payload: json!({
                "choice": choice,
                "stopped": stopped,
                "goal_reached": result.goal_reached,
                "points": points,
                "round_points": total(&points),
                "total_points": self.points(),
            }),
        })
    }

    pub fn choose(&mut self, choice: Choice, exp: &Experiment) -> Result<Vec<Event>, SessionError> {
        if self.phase != Phase::AwaitChoice {
            return Err(self.conflict("choice"));
        }
        let level = self.level;
        self.current_mut().choice = Some(choice);
        self.observations.push((level, choice == Choice::Monitor));
        let mut events = vec![Event {
            round: self.round_no(),
            kind: "choice",
            payload: json!({"level": level, "choice": choice}),
        }];
        match choice {
            Choice::Monitor if self.plan_len(exp) > 0 => self.phase = Phase::Watching,
            // A labeling supervisor never sees the plan, which runs to completion.
            _ => events.push(self.settle(false, &exp.loaded.config.scoring)?),
        }
        Ok(events)
    }

    pub fn next_step(&mut self, exp: &Experiment) -> Result<(StepView, Vec<Event>), SessionError> {
        match self.phase {
            Phase::Watching => {}
            Phase::AwaitQuestionnaire | Phase::Done if self.current().choice == Some(Choice::Monitor) => {
                return Err(SessionError::NotFound("the plan has finished".into()));
            }
            _ => return Err(self.conflict("step")),
        }
        let r = self.current();
        let i = r.level - 1;
        let plan = &exp.triples[i].get(r.strategy).plan;
        let idx = r.steps_shown;
        let action = plan.steps[idx].clone();
        let position = exp.loaded.tasks[exp.order[i]]
            .map
            .as_ref()
            .map(|m| m.trace(plan)[idx + 1]);
        let last = idx + 1 == plan.len();
        self.current_mut().steps_shown = idx + 1;
        let mut events = vec![Event {
            round: self.round_no(),
            kind: "step",
            payload: json!({"step": idx + 1, "action": action}),
        }];
        if last {
            events.push(self.settle(false, &exp.loaded.config.scoring)?);
        }
        Ok((
            StepView {
                step: idx + 1,
                action,
                position,
                last,
            },
            events,
        ))
    }

    pub fn stop(&mut self, exp: &Experiment) -> Result<Vec<Event>, SessionError> {
        if self.phase != Phase::Watching {
            return Err(self.conflict("stop"));
        }
        let at = self.current().steps_shown;
        self.current_mut().stopped_at = Some(at);
        let stop = Event {
            round: self.round_no(),
            kind: "stop",
            payload: json!({"step": at}),
        };
        Ok(vec![stop, self.settle(true, &exp.loaded.config.scoring)?])
    }

    pub fn questionnaire(&mut self, q: Questionnaire, exp: &Experiment) -> Result<Vec<Event>, SessionError> {
        if self.phase != Phase::AwaitQuestionnaire {
            return Err(self.conflict("questionnaire"));
        }
        let (scalar, level) = q.score(exp.k()).map_err(|e| SessionError::Validation(e.to_string()))?;
        self.current_mut().ratings = Some(q);
        self.trust_scalar = scalar;
        self.level = level;
        let mut events = vec![Event {
            round: self.round_no(),
            kind: "questionnaire",
            payload: json!({"ratings": q, "scalar": scalar, "level": level}),
        }];
        if self.condition == Condition::TrustAware && exp.loaded.config.policy_source == PolicySource::Recomputed {
            let omega = estimated_omega(exp, &self.observations);
            self.policy = exp
                .resolve_with_omega(&omega)
                .map_err(|e| SessionError::Validation(e.to_string()))?
                .choice;
        }
        if self.round_no() >= exp.loaded.config.rounds {
            self.phase = Phase::Done;
            events.push(Event {
                round: self.round_no(),
                kind: "done",
                payload: json!({"total_points": self.points()}),
            });
        } else {
            events.push(self.start_round(exp));
        }
        Ok(events)
    }

    pub fn view(&self, exp: &Experiment) -> RoundView {
        let r = self.current();
        let i = r.level - 1;
        RoundView {
            session: self.id.clone(),
            round: r.round,
            rounds: exp.loaded.config.rounds,
            phase: self.phase,
            level: r.level,
            task: r.task.clone(),
            map: exp.loaded.tasks[exp.order[i]].map.as_ref().map(|m| m.to_string()),
            plan_length: self.plan_len(exp),
            steps_shown: r.steps_shown,
            points: self.points(),
        }
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            session: self.id.clone(),
            condition: self.condition,
            phase: self.phase,
            level: self.level,
            trust_scalar: self.trust_scalar,
            points: self.points(),
            rounds: self.rounds.clone(),
        }
    }
}
