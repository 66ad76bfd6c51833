//! Scenario and model-pair configuration files (TOML).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost::Cost;
use crate::grid::GridMap;
use crate::harness::episode::PolicySource;
use crate::harness::scoring::ScoringTable;
use crate::metamdp::{LevelSpec, Response, TrustScenario};
use crate::planning::{parse_model, SearchLimits};
use crate::reconcile::{ExplicabilityMetric, MessageCosts, ModelPair, StrategyOptions, StrategyTag};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {message}")]
    Invalid { path: PathBuf, message: String },
}

fn read(path: &Path) -> Result<String, ConfigError> {
    fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_toml<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, ConfigError> {
    toml::from_str(&read(path)?).map_err(|e| ConfigError::Parse {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn relative_to(base: &Path, file: &str) -> PathBuf {
    base.parent().unwrap_or(Path::new(".")).join(file)
}

/// A model-pair file: two model files and optional explanation costs and
/// human-view map.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairConfig {
    pub name: Option<String>,
    pub robot: String,
    pub human: String,
    /// Map of the task as the human sees it.
    pub map: Option<String>,
    #[serde(default)]
    pub message_costs: MessageCosts,
}

/// A loaded model pair, ready for planning.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedPair {
    pub name: String,
    pub pair: ModelPair,
    pub map: Option<GridMap>,
}

pub fn load_pair(path: &Path, limits: &SearchLimits) -> Result<LoadedPair, ConfigError> {
    let cfg: PairConfig = parse_toml(path)?;
    let model = |file: &str| {
        let p = relative_to(path, file);
        parse_model(&read(&p)?).map_err(|e| ConfigError::Parse {
            path: p.clone(),
            message: e.to_string(),
        })
    };
    let robot = model(&cfg.robot)?;
    let human = model(&cfg.human)?;
    let pair = ModelPair::new(robot, human, cfg.message_costs, limits).map_err(|e| ConfigError::Invalid {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let map = match &cfg.map {
        None => None,
        Some(file) => {
            let p = relative_to(path, file);
            Some(GridMap::parse(&read(&p)?).map_err(|e| ConfigError::Parse {
                path: p.clone(),
                message: e.to_string(),
            })?)
        }
    };
    let name = cfg.name.unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default()
    });
    Ok(LoadedPair { name, pair, map })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub anchor: f64,
    /// Defaults to `1 - anchor`.
    pub omega: Option<f64>,
    pub task: String,
}

fn default_gamma() -> f64 {
    0.9
}
fn default_rounds() -> usize {
    10
}
fn default_monitoring_cost() -> Cost {
    Cost::from_int(3)
}
fn default_initial_level() -> usize {
    1
}
fn default_balance_weight() -> Cost {
    Cost::ONE
}
fn default_candidate_budget() -> usize {
    5
}
fn default_strategies() -> Vec<StrategyTag> {
    StrategyTag::ALL.to_vec()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default)]
    pub fail_penalty: Cost,
    #[serde(default)]
    pub response: Response,
    #[serde(default)]
    pub metric: ExplicabilityMetric,
    #[serde(default = "default_balance_weight")]
    pub balance_weight: Cost,
    #[serde(default = "default_candidate_budget")]
    pub candidate_budget: usize,
    #[serde(default = "default_strategies")]
    pub strategies: Vec<StrategyTag>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    /// Cost charged for every monitored round, in plan-cost units.
    #[serde(default = "default_monitoring_cost")]
    pub monitoring_cost_per_round: Cost,
    #[serde(default = "default_initial_level")]
    pub initial_level: usize,
    #[serde(default)]
    pub policy_source: PolicySource,
    #[serde(default)]
    pub scoring: ScoringTable,
    pub levels: Vec<LevelConfig>,
}

/// A scenario file with every referenced pair loaded.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedScenario {
    pub path: PathBuf,
    pub config: ScenarioConfig,
    pub tasks: Vec<LoadedPair>,
}

impl ScenarioConfig {
    pub fn strategy_options(&self, limits: &SearchLimits) -> StrategyOptions {
        StrategyOptions {
            balance_weight: self.balance_weight,
            candidate_budget: self.candidate_budget,
            metric: self.metric,
            limits: limits.clone(),
            ..StrategyOptions::default()
        }
    }

    fn check(&self, path: &Path) -> Result<(), ConfigError> {
        let invalid = |message: String| ConfigError::Invalid {
            path: path.to_path_buf(),
            message,
        };
        if self.rounds == 0 {
            return Err(invalid("rounds must be positive".into()));
        }
        if self.candidate_budget == 0 {
            return Err(invalid("candidate_budget must be positive".into()));
        }
        if self.balance_weight.is_negative() {
            return Err(invalid("balance_weight must be non-negative".into()));
        }
        if self.monitoring_cost_per_round.is_negative() {
            return Err(invalid("monitoring_cost_per_round must be non-negative".into()));
        }
        if self.initial_level == 0 || self.initial_level > self.levels.len() {
            return Err(invalid(format!(
                "initial_level {} outside 1..={}",
                self.initial_level,
                self.levels.len()
            )));
        }
        Ok(())
    }
}

impl LoadedScenario {
    pub fn load(path: &Path, limits: &SearchLimits) -> Result<LoadedScenario, ConfigError> {
        let config: ScenarioConfig = parse_toml(path)?;
        config.check(path)?;
        let tasks = config
            .levels
            .iter()
            .map(|l| load_pair(&relative_to(path, &l.task), limits))
            .collect::<Result<Vec<_>, _>>()?;
        let loaded = LoadedScenario {
            path: path.to_path_buf(),
            config,
            tasks,
        };
        loaded.scenario().validate().map_err(|e| ConfigError::Invalid {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Ok(loaded)
    }

    /// The trust scenario the configuration describes.
    pub fn scenario(&self) -> TrustScenario {
        let c = &self.config;
        TrustScenario {
            name: c.name.clone(),
            levels: c
                .levels
                .iter()
                .zip(&self.tasks)
                .map(|(l, t)| LevelSpec {
                    anchor: l.anchor,
                    omega: l.omega.unwrap_or(1.0 - l.anchor),
                    task_name: t.name.clone(),
                    task: t.pair.clone(),
                })
                .collect(),
            gamma: c.gamma,
            fail_penalty: c.fail_penalty,
            response: c.response,
            metric: c.metric,
            strategies: c.strategies.clone(),
        }
    }
}
