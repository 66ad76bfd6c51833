//! Study points for each round.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Choice {
    /// Watch the robot, with the option to stop it.
    Monitor,
    /// Do the side task instead of watching.
    Label,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoringTable {
    /// Robot reaches the goal.
    pub task_success: i64,
    /// Supervisor stopped the robot.
    pub monitor_stop: i64,
    /// Robot finishes without reaching the goal.
    pub failure: i64,
    /// Side-task reward for labeling.
    pub label_bonus: i64,
    /// When set, a failed labeled round forfeits the labeling reward.
    pub forfeit_label_bonus_on_failure: bool,
}

impl Default for ScoringTable {
    fn default() -> Self {
        ScoringTable {
            task_success: 100,
            monitor_stop: 50,
            failure: -200,
            label_bonus: 100,
            forfeit_label_bonus_on_failure: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PointReason {
    TaskSuccess,
    Stopped,
    Failure,
    LabelBonus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointEntry {
    pub reason: PointReason,
    pub points: i64,
}

/// What happened to the robot in a round, as far as scoring is concerned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundResult {
    pub stopped: bool,
    pub goal_reached: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScoringError {
    #[error("a stopped robot cannot have reached its goal")]
    StoppedAndReached,
    #[error("a labeling supervisor cannot stop the robot")]
    LabelStopped,
}

/// Point entries for one round; the round's score is their sum.
pub fn score_round(choice: Choice, result: RoundResult, table: &ScoringTable) -> Result<Vec<PointEntry>, ScoringError> {
    use PointReason::*;
    if result.stopped && result.goal_reached {
        return Err(ScoringError::StoppedAndReached);
    }
    let entry = |reason, points| PointEntry { reason, points };
    Ok(match (choice, result.stopped, result.goal_reached) {
        (Choice::Monitor, true, _) => vec![entry(Stopped, table.monitor_stop)],
        (Choice::Monitor, false, true) => vec![entry(TaskSuccess, table.task_success)],
        (Choice::Monitor, false, false) => vec![entry(Failure, table.failure)],
        (Choice::Label, true, _) => return Err(ScoringError::LabelStopped),
        (Choice::Label, false, true) => vec![
            entry(TaskSuccess, table.task_success),
            entry(LabelBonus, table.label_bonus),
        ],
        (Choice::Label, false, false) if table.forfeit_label_bonus_on_failure => vec![entry(Failure, table.failure)],
        (Choice::Label, false, false) => vec![entry(Failure, table.failure), entry(LabelBonus, table.label_bonus)],
    })
}

pub fn total(entries: &[PointEntry]) -> i64 {
    entries.iter().map(|e| e.points).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(choice: Choice, stopped: bool, goal_reached: bool, table: &ScoringTable) -> i64 {
        total(&score_round(choice, RoundResult { stopped, goal_reached }, table).unwrap())
    }

    #[test]
    fn table_rules() {
        let t = ScoringTable::default();
        assert_eq!(pts(Choice::Monitor, false, true, &t), 100);
        assert_eq!(pts(Choice::Monitor, true, false, &t), 50);
        assert_eq!(pts(Choice::Monitor, false, false, &t), -200);
        assert_eq!(pts(Choice::Label, false, true, &t), 200);
        assert_eq!(pts(Choice::Label, false, false, &t), -100);
        let forfeit = ScoringTable {
            forfeit_label_bonus_on_failure: true,
            ..t
        };
        assert_eq!(pts(Choice::Label, false, false, &forfeit), -200);
    }

    #[test]
    fn inconsistent_outcomes() {
        let t = ScoringTable::default();
        let r = |stopped, goal_reached| RoundResult { stopped, goal_reached };
        assert_eq!(
            score_round(Choice::Label, r(true, false), &t),
            Err(ScoringError::LabelStopped)
        );
        assert_eq!(
            score_round(Choice::Monitor, r(true, true), &t),
            Err(ScoringError::StoppedAndReached)
        );
    }
}
