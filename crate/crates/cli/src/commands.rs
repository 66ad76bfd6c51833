use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use serde_json::{json, Value};

use trustplan::grid::{GridCosts, GridMap};
use trustplan::harness::store::{monitor_observations, parse_log};
use trustplan::harness::{
    compare_conditions, default_axes, load_pair, run_episode, sweep, total, Condition, EpisodeTrace, Experiment,
    LoadedScenario, PolicySource, SweepAxis,
};
use trustplan::planning::{optimal_plan, parse_model, plan_cost, serialize_model, Plan, SearchLimits};
use trustplan::reconcile::{explicability, mce, strategy_triple, ExplicabilityMetric, MceOptions, StrategyOptions};
use trustplan::supervisor::estimate_omega;
use trustplan::{AnnotatedPlan, Cost};

use crate::{canonical_json, Cli, Command};

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_experiment(path: &Path, limits: &SearchLimits) -> Result<Experiment> {
    let loaded = LoadedScenario::load(path, limits)?;
    Ok(Experiment::new(loaded, limits)?)
}

fn parse_metric(s: &str) -> Result<ExplicabilityMetric> {
    serde_json::from_value(Value::String(s.to_string()))
        .map_err(|_| anyhow::anyhow!("unknown metric `{s}` (expected human-model-diff or robot-model-diff)"))
}

fn annotated_text(out: &mut String, ap: &AnnotatedPlan) {
    let explanation: Vec<String> = ap.explanation.iter().map(ToString::to_string).collect();
    let _ = writeln!(
        out,
        "{:<10} cost {}  explanation {}  execution {}  explicability {}",
        ap.tag.to_string(),
        ap.plan_cost,
        ap.explanation_cost,
        ap.execution_cost,
        ap.explicability
    );
    let _ = writeln!(out, "  plan {}", ap.plan);
    if !explanation.is_empty() {
        let _ = writeln!(out, "  explain {}", explanation.join("; "));
    }
}

fn trace_text(t: &EpisodeTrace) -> String {
    let mut out = format!(
        "scenario {} condition {} policy {} seed {}\n",
        t.scenario, t.condition, t.policy_source, t.seed
    );
    for r in &t.rounds {
        let stop = r.stopped_at.map_or("-".to_string(), |s| s.to_string());
        let _ = writeln!(
            out,
            "round {:>2} level {} task {} strategy {} monitored {} stop {} goal {} cost {} monitoring {} next {} points {}",
            r.round,
            r.level,
            r.task,
            r.strategy.short(),
            if r.monitored { "yes" } else { "no" },
            stop,
            if r.goal_reached { "yes" } else { "no" },
            r.realized_cost,
            r.monitoring_cost,
            r.next_level,
            total(&r.points)
        );
    }
    let _ = write!(
        out,
        "total cost {} (execution {}, monitoring {})  points {}  final level {}",
        t.total_cost,
        t.cumulative_execution_cost,
        t.cumulative_monitoring_cost,
        t.total_points,
        t.final_level()
    );
    out
}

/// `(level, monitored)` observations from either a session log (JSON lines)
/// or a simulated episode trace (one JSON document, or an array of them).
fn observations_from(text: &str) -> Result<Vec<(usize, bool)>> {
    fn from_trace(v: &Value) -> Option<Vec<(usize, bool)>> {
        v.get("rounds")?
            .as_array()?
            .iter()
            .map(|r| Some((r.get("level")?.as_u64()? as usize, r.get("monitored")?.as_bool()?)))
            .collect()
    }
    if let Ok(v) = serde_json::from_str::<Value>(text) {
        if let Some(obs) = from_trace(&v) {
            return Ok(obs);
        }
        if let Some(items) = v.as_array() {
            let mut all = Vec::new();
            for item in items {
                all.extend(from_trace(item).context("array entries must be episode traces")?);
            }
            return Ok(all);
        }
    }
    Ok(monitor_observations(&parse_log(text)?))
}

/// Runs every command except `serve` and returns what it prints.
pub fn run(cli: &Cli) -> Result<String> {
    let limits = SearchLimits::with_budget(cli.node_budget);
    match &cli.command {
        Command::Plan { model } => {
            let m = parse_model(&read(model)?).with_context(|| format!("in {}", model.display()))?;
            let plan = optimal_plan(&m, &limits)?;
            let cost = plan_cost(&m, &plan);
            if cli.json {
                return Ok(canonical_json(&json!({"cost": cost, "plan": plan})));
            }
            let mut out = format!("cost {cost} ({} steps)\n", plan.len());
            for s in &plan.steps {
                out.push_str(s);
                out.push('\n');
            }
            Ok(out.trim_end().to_string())
        }
        Command::Triple {
            pair,
            alpha,
            candidates,
            metric,
        } => {
            let loaded = load_pair(pair, &limits)?;
            let opts = StrategyOptions {
                balance_weight: alpha.parse::<Cost>().map_err(|e| anyhow::anyhow!("--alpha: {e}"))?,
                candidate_budget: *candidates,
                metric: parse_metric(metric)?,
                limits,
                ..StrategyOptions::default()
            };
            let triple = strategy_triple(&loaded.pair, &opts)?;
            if cli.json {
                return Ok(canonical_json(&triple));
            }
            let mut out = String::new();
            for ap in [&triple.explicable, &triple.balanced, &triple.optimal] {
                annotated_text(&mut out, ap);
            }
            Ok(out.trim_end().to_string())
        }
        Command::Explain { pair, plan } => {
            let loaded = load_pair(pair, &limits)?;
            let plan = Plan::parse(&read(plan)?);
            let opts = MceOptions {
                limits: limits.clone(),
                ..MceOptions::default()
            };
            let messages = mce(&loaded.pair, &plan, &opts)?;
            let cost = loaded.pair.message_costs().total(&messages);
            let metric = ExplicabilityMetric::HumanModelDiff;
            let before = explicability(&plan, &loaded.pair, &BTreeSet::new(), metric, &limits)?;
            let after = explicability(&plan, &loaded.pair, &messages, metric, &limits)?;
            if cli.json {
                return Ok(canonical_json(&json!({
                    "plan": plan,
                    "explanation": messages,
                    "cost": cost,
                    "explicability_before": before,
                    "explicability_after": after,
                })));
            }
            let mut out = format!("plan {plan}\nexplanation cost {cost} ({} messages)\n", messages.len());
            for m in &messages {
                let _ = writeln!(out, "  {m}");
            }
            let _ = write!(out, "explicability {before} -> {after}");
            Ok(out)
        }
        Command::SolveMeta { scenario } => {
            let exp = load_experiment(scenario, &limits)?;
            let report = exp.report();
            Ok(if cli.json {
                canonical_json(&report)
            } else {
                report.to_string()
            })
        }
        Command::Simulate {
            scenario,
            condition,
            seeds,
            seed,
            policy_source,
            csv,
            plot_data,
        } => {
            if *seeds == 0 {
                bail!("--seeds must be at least 1");
            }
            let exp = load_experiment(scenario, &limits)?;
            let source = match policy_source {
                Some(s) => s.parse::<PolicySource>().map_err(anyhow::Error::msg)?,
                None => exp.loaded.config.policy_source,
            };
            let condition = condition
                .as_deref()
                .map(str::parse::<Condition>)
                .transpose()
                .map_err(anyhow::Error::msg)?;
            if let (Some(c), 1, None, None) = (condition, seeds, csv, plot_data) {
                let trace = run_episode(&exp, c, *seed, source)?;
                return Ok(if cli.json {
                    canonical_json(&trace)
                } else {
                    trace_text(&trace)
                });
            }
            let conditions = match condition {
                Some(c) => vec![c],
                None => Condition::ALL.to_vec(),
            };
            let seed_list: Vec<u64> = (*seed..seed + seeds).collect();
            let cmp = compare_conditions(&exp, &conditions, &seed_list, source)?;
            if let Some(p) = csv {
                fs::write(p, cmp.to_csv()).with_context(|| format!("cannot write {}", p.display()))?;
            }
            if let Some(p) = plot_data {
                fs::write(p, cmp.plot_data()).with_context(|| format!("cannot write {}", p.display()))?;
            }
            Ok(if cli.json {
                canonical_json(&cmp)
            } else {
                cmp.to_string().trim_end().to_string()
            })
        }
        Command::Sweep { scenario, axis } => {
            let exp = load_experiment(scenario, &limits)?;
            let axes = if axis.is_empty() {
                default_axes(&exp)
            } else {
                axis.iter()
                    .map(|a| a.parse::<SweepAxis>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(anyhow::Error::msg)?
            };
            let table = sweep(&exp, &axes)?;
            Ok(if cli.json {
                canonical_json(&table)
            } else {
                table.to_string()
            })
        }
        Command::EstimateOmega { logs, alpha, levels } => {
            let mut obs = Vec::new();
            for path in logs {
                obs.extend(observations_from(&read(path)?).with_context(|| format!("in {}", path.display()))?);
            }
            if let Some((l, _)) = obs.iter().find(|(l, _)| *l == 0 || l > levels) {
                bail!("observation at level {l} is outside 1..={levels}");
            }
            let est = estimate_omega(obs, *alpha, *levels);
            if cli.json {
                return Ok(canonical_json(&est));
            }
            let mut out = String::new();
            for (i, w) in est.per_level.iter().enumerate() {
                let (m, n) = est.counts[i];
                let flag = if est.low_confidence[i] {
                    "  (no observations)"
                } else {
                    ""
                };
                let _ = writeln!(out, "level {}  omega {:.4}  monitored {m}/{n}{flag}", i + 1, w);
            }
            Ok(out.trim_end().to_string())
        }
        Command::CompileMap { map, rubble_cost } => {
            let grid = GridMap::parse(&read(map)?).with_context(|| format!("in {}", map.display()))?;
            let costs = GridCosts {
                rubble: rubble_cost
                    .parse::<Cost>()
                    .map_err(|e| anyhow::anyhow!("--rubble-cost: {e}"))?,
                ..GridCosts::default()
            };
            let model = grid.to_model(&costs)?;
            let text = serialize_model(&model);
            Ok(if cli.json {
                canonical_json(&json!({ "model": text }))
            } else {
                text.trim_end().to_string()
            })
        }
        Command::Serve { .. } => bail!("serve is handled by the binary"),
    }
}
