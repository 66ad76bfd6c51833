use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn scenarios() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trustplan"))
        .args(args)
        .current_dir(scenarios())
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    serde_json::from_str(&ok(&all)).unwrap()
}

#[test]
fn plan_prints_cost_and_steps() {
    let text = ok(&["plan", "office/reach.robot.model"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("cost 8 (6 steps)"));
    assert_eq!(lines.count(), 6);
    let v = json(&["plan", "office/reach.human.model"]);
    assert_eq!(v["cost"], "10");
    assert_eq!(v["plan"].as_array().unwrap().len(), 10);
}

#[test]
fn triple_lists_three_strategies() {
    let text = ok(&["triple", "office/coffee-lab.toml"]);
    let heads: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with(' '))
        .map(|l| l.split_whitespace().next().unwrap())
        .collect();
    assert_eq!(heads, ["explicable", "balanced", "optimal"]);
    let v = json(&["triple", "office/coffee-lab.toml", "--alpha", "1/2"]);
    assert_eq!(v["explicable"]["execution_cost"], "29");
    assert_eq!(v["optimal"]["execution_cost"], "13");
}

#[test]
fn explain_makes_the_optimal_plan_explicable() {
    let dir = tempfile::tempdir().unwrap();
    let plan = dir.path().join("plan.txt");
    let robot = ok(&["plan", "office/reach.robot.model"]);
    fs::write(&plan, robot.lines().skip(1).collect::<Vec<_>>().join("\n")).unwrap();
    let plan = plan.to_str().unwrap();
    let v = json(&["explain", "office/reach.toml", plan]);
    assert_eq!(v["explanation"].as_array().unwrap().len(), 1);
    assert_eq!(v["cost"], "50");
    assert_eq!(v["explicability_after"], "0");
    assert!(ok(&["explain", "office/reach.toml", plan]).ends_with("-> 0\n"));
}

#[test]
fn solve_meta_reports_the_policy() {
    let v = json(&["solve-meta", "rover/scenario.toml"]);
    let text = v.to_string();
    assert!(text.contains("explicable") && text.contains("optimal"));
    assert!(ok(&["solve-meta", "rover/scenario.toml"]).contains("[exp, exp, exp, opt]"));
}

#[test]
fn simulate_writes_tables_and_traces() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("summary.csv");
    let plot = dir.path().join("episodes.csv");
    let text = ok(&[
        "simulate",
        "office/scenario.toml",
        "--seeds",
        "20",
        "--csv",
        csv.to_str().unwrap(),
        "--plot-data",
        plot.to_str().unwrap(),
    ]);
    for c in ["trust-aware", "always-explicable", "always-optimal", "random"] {
        assert!(text.contains(c), "{text}");
    }
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 5);
    assert_eq!(fs::read_to_string(&plot).unwrap().lines().count(), 1 + 4 * 20);

    let trace = ok(&[
        "simulate",
        "office/scenario.toml",
        "--condition",
        "random",
        "--seed",
        "3",
    ]);
    assert_eq!(trace.lines().filter(|l| l.starts_with("round")).count(), 10);
}

#[test]
fn sweep_accepts_axes() {
    let v = json(&["sweep", "office/scenario.toml", "--axis", "omega=0,0,0,0;1,1,1,1"]);
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    assert!(ok(&["sweep", "office/scenario.toml"]).contains("27"));
    let bad = run(&["sweep", "office/scenario.toml", "--axis", "colour=3"]);
    assert!(!bad.status.success());
}

#[test]
fn omega_is_estimated_from_traces() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.json");
    fs::write(
        &trace,
        ok(&[
            "simulate",
            "office/scenario.toml",
            "--condition",
            "always-explicable",
            "--json",
        ]),
    )
    .unwrap();
    let v = json(&["estimate-omega", trace.to_str().unwrap()]);
    assert_eq!(v["per_level"].as_array().unwrap().len(), 4);
    let bad = run(&["estimate-omega", trace.to_str().unwrap(), "--levels", "2"]);
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).contains("outside 1..=2"));
}

#[test]
fn compile_map_matches_the_bundled_models() {
    for f in ["reach.human", "coffee-relay.robot"] {
        let out = ok(&["compile-map", &format!("office/{f}.map")]);
        let stored = fs::read_to_string(scenarios().join(format!("office/{f}.model"))).unwrap();
        assert_eq!(out.trim_end(), stored.trim_end(), "{f}");
    }
    let cheap = ok(&["compile-map", "office/reach.robot.map", "--rubble-cost", "1"]);
    assert_ne!(
        cheap.trim_end(),
        fs::read_to_string(scenarios().join("office/reach.robot.model"))
            .unwrap()
            .trim_end()
    );
}

#[test]
fn failures_exit_non_zero_with_a_message() {
    let out = run(&["plan", "missing.model"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error: ") && err.contains("missing.model"), "{err}");
    assert!(!run(&["simulate", "office/scenario.toml", "--condition", "sometimes"])
        .status
        .success());
    assert!(!run(&["simulate", "office/scenario.toml", "--seeds", "0"])
        .status
        .success());
}
