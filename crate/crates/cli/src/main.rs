use std::net::SocketAddr;
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::Parser;

use trustplan::harness::SessionStore;
use trustplan::planning::SearchLimits;
use trustplan_cli::server::{serve, AppState};
use trustplan_cli::{commands, Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Serve {
            port,
            host,
            scenario,
            log_dir,
        } => run_server(&cli, host, *port, scenario, log_dir),
        _ => commands::run(&cli).map(|out| println!("{out}")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run_server(
    cli: &Cli,
    host: &str,
    port: u16,
    scenario: &std::path::Path,
    log_dir: &std::path::Path,
) -> anyhow::Result<()> {
    let limits = SearchLimits::with_budget(cli.node_budget);
    let exp = commands::load_experiment(scenario, &limits)?;
    let store = SessionStore::open(log_dir).with_context(|| format!("cannot open {}", log_dir.display()))?;
    let addr: SocketAddr = format!("{host}:{port}")
        .parse()
        .with_context(|| format!("bad listen address {host}:{port}"))?;
    let state = Arc::new(AppState::new(exp, store));
    tokio::runtime::Runtime::new()?.block_on(serve(addr, state))?;
    Ok(())
}
