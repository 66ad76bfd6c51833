//! Append-only session logs.
//!
//! Each session writes one JSON object per line to `<dir>/<session>.jsonl`;
//! `<dir>/index.jsonl` gets one line per created session. Lines are written
//! with a single append so a crash never leaves a partial record in the
//! middle of a file.

use std::fs::{self, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::harness::scoring::{score_round, total, Choice, PointEntry, RoundResult, ScoringTable};
use crate::harness::session::Event;

/// Source of log timestamps in milliseconds since the Unix epoch.
pub trait Clock: Send + Sync {
    fn now_millis(&self) -> u64;
}

#[derive(Debug, Default)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now_millis(&self) -> u64 {
        SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_or(0, |d| d.as_millis() as u64)
    }
}

/// Starts at a fixed instant and advances one millisecond per reading.
#[derive(Debug, Default)]
pub struct StepClock(AtomicU64);

impl StepClock {
    pub fn starting_at(millis: u64) -> StepClock {
        StepClock(AtomicU64::new(millis))
    }
}

impl Clock for StepClock {
    fn now_millis(&self) -> u64 {
        self.0.fetch_add(1, Ordering::SeqCst)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLine {
    pub ts: u64,
    pub session: String,
    pub round: usize,
    pub kind: String,
    pub payload: Value,
}

impl LogLine {
    pub fn new(ts: u64, session: &str, event: &Event) -> LogLine {
        LogLine {
            ts,
            session: session.to_string(),
            round: event.round,
            kind: event.kind.to_string(),
            payload: event.payload.clone(),
        }
    }

    /// One line of JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let v = serde_json::to_value(self).expect("log lines serialise");
        serde_json::to_string(&v).expect("log lines serialise")
    }
}

#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<SessionStore> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SessionStore { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn session_path(&self, session: &str) -> PathBuf {
        self.dir.join(format!("{session}.jsonl"))
    }

    fn append_to(path: &Path, lines: &[String]) -> io::Result<()> {
        if lines.is_empty() {
            return Ok(());
        }
        let mut buf = lines.join("\n");
        buf.push('\n');
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        f.write_all(buf.as_bytes())?;
        f.sync_data()
    }

    pub fn append(&self, lines: &[LogLine]) -> io::Result<()> {
        let Some(first) = lines.first() else {
            return Ok(());
        };
        let text: Vec<String> = lines.iter().map(LogLine::to_json).collect();
        Self::append_to(&self.session_path(&first.session), &text)
    }

    pub fn index(&self, entry: &Value) -> io::Result<()> {
        let line = serde_json::to_string(entry).expect("index entries serialise");
        Self::append_to(&self.dir.join("index.jsonl"), &[line])
    }

    pub fn read(&self, session: &str) -> io::Result<Vec<LogLine>> {
        parse_log(&fs::read_to_string(self.session_path(session))?)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
    }
}

pub fn parse_log(text: &str) -> Result<Vec<LogLine>, serde_json::Error> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(serde_json::from_str)
        .collect()
}

/// `(level, monitored)` pairs from the choice records of a log.
pub fn monitor_observations(lines: &[LogLine]) -> Vec<(usize, bool)> {
    lines
        .iter()
        .filter(|l| l.kind == "choice")
        .filter_map(|l| {
            let level = l.payload.get("level")?.as_u64()? as usize;
            let choice: Choice = serde_json::from_value(l.payload.get("choice")?.clone()).ok()?;
            Some((level, choice == Choice::Monitor))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("log has no creation record")]
    NoHeader,
    #[error("malformed {kind} record in round {round}")]
    Malformed { kind: String, round: usize },
    #[error("round {round}: stored points {stored:?} but scoring gives {computed:?}")]
    Mismatch {
        round: usize,
        stored: Vec<PointEntry>,
        computed: Vec<PointEntry>,
    },
    #[error("round {round}: stored total {stored} but replay gives {computed}")]
    Total { round: usize, stored: i64, computed: i64 },
}

/// Re-scores every outcome of a session log with the scoring table it was
/// created with and checks the stored entries and running totals. Returns
/// the final total.
pub fn replay_points(lines: &[LogLine]) -> Result<i64, ReplayError> {
    let header = lines
        .iter()
        .find(|l| l.kind == "created")
        .ok_or(ReplayError::NoHeader)?;
    let table: ScoringTable = header
        .payload
        .get("scoring")
        .and_then(|v| serde_json::from_value(v.clone()).ok())
        .ok_or(ReplayError::Malformed {
            kind: "created".into(),
            round: header.round,
        })?;
    let mut running = 0;
    for l in lines.iter().filter(|l| l.kind == "outcome") {
        let bad = || ReplayError::Malformed {
            kind: l.kind.clone(),
            round: l.round,
        };
        let field = |k: &str| l.payload.get(k).cloned().ok_or_else(bad);
        let choice: Choice = serde_json::from_value(field("choice")?).map_err(|_| bad())?;
        let result = RoundResult {
            stopped: field("stopped")?.as_bool().ok_or_else(bad)?,
            goal_reached: field("goal_reached")?.as_bool().ok_or_else(bad)?,
        };
        let stored: Vec<PointEntry> = serde_json::from_value(field("points")?).map_err(|_| bad())?;
        let computed = score_round(choice, result, &table).map_err(|_| bad())?;
        if stored != computed {
            return Err(ReplayError::Mismatch {
                round: l.round,
                stored,
                computed,
            });
        }
        running += total(&computed);
        let stored_total = field("total_points")?.as_i64().ok_or_else(bad)?;
        if stored_total != running {
            return Err(ReplayError::Total {
                round: l.round,
                stored: stored_total,
                computed: running,
            });
        }
    }
    Ok(running)
}
