//! Command-line front end and HTTP session service.

pub mod commands;
pub mod server;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use serde::Serialize;

/// Serialises with sorted keys and no insignificant whitespace.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serialisable value");
    serde_json::to_string(&v).expect("serialisable value")
}

#[derive(Debug, Parser)]
#[command(
    name = "trustplan",
    version,
    about = "Trust-aware planning under intermittent supervision"
)]
pub struct Cli {
    /// Emit canonical JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Node budget for each optimal-plan search.
    #[arg(long, global = true, default_value_t = trustplan::planning::DEFAULT_NODE_BUDGET)]
    pub node_budget: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal plan for a model file.
    Plan { model: PathBuf },
    /// Explicable, balanced and optimal strategies for a model-pair file.
    Triple {
        pair: PathBuf,
        /// Weight of the explicability penalty in the balanced objective.
        #[arg(long, default_value = "1")]
        alpha: String,
        /// Number of cheapest robot plans the balanced search considers.
        #[arg(long, default_value_t = 5)]
        candidates: usize,
        #[arg(long, default_value = "human-model-diff")]
        metric: String,
    },
    /// Minimally complete explanation for a plan of a model pair.
    Explain { pair: PathBuf, plan: PathBuf },
    /// Build and solve the trust-level decision process of a scenario.
    SolveMeta { scenario: PathBuf },
    /// Simulate supervised episodes.
    Simulate {
        scenario: PathBuf,
        /// One condition, or every condition when omitted.
        #[arg(long)]
        condition: Option<String>,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 1)]
        seeds: u64,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `fixed` or `recomputed`; defaults to the scenario's setting.
        #[arg(long)]
        policy_source: Option<String>,
        /// Also write the summary table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Also write per-episode rows for plotting.
        #[arg(long)]
        plot_data: Option<PathBuf>,
    },
    /// Solve the decision process over a parameter grid.
    Sweep {
        scenario: PathBuf,
        /// `gamma=..`, `omega-scale=..`, `omega=a,b,c,d;..`, `anchors=..;..`
        /// or `task-order=0,1,2,3;..`. The default 27-point grid is used
        /// when no axis is given.
        #[arg(long)]
        axis: Vec<String>,
    },
    /// Estimate per-level monitoring probabilities from session logs or
    /// simulated traces.
    EstimateOmega {
        #[arg(required = true)]
        logs: Vec<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        /// Number of trust levels.
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Compile an ASCII grid map to a model file.
    CompileMap {
        map: PathBuf,
        #[arg(long, default_value = "3")]
        rubble_cost: String,
    },
    /// Serve the HTTP session API.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        host: String,
        #[arg(long)]
        scenario: PathBuf,
        /// Directory for session logs.
        #[arg(long, default_value = "sessions")]
        log_dir: PathBuf,
    },
}
