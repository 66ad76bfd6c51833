use criterion::{black_box, criterion_group, criterion_main, Criterion};

use trustplan::harness::{run_episode, Condition, PolicySource};
use trustplan::metamdp::{solve, DEFAULT_TOLERANCE};
use trustplan::planning::{optimal_plan, SearchLimits};
use trustplan::reconcile::{mce, MceOptions};
use trustplan_bench::{blocks, experiment, grid, surprising_pair};

fn planning(c: &mut Criterion) {
    let limits = SearchLimits::default();
    let mut g = c.benchmark_group("optimal_plan");
    for (name, model) in [
        ("grid-8x8", grid(1, 8, 8)),
        ("grid-12x12", grid(2, 12, 12)),
        ("blocks-4", blocks(3, 4)),
    ] {
        g.bench_function(name, |b| b.iter(|| optimal_plan(black_box(&model), &limits).unwrap()));
    }
    g.finish();
}

fn explanation(c: &mut Criterion) {
    let pair = surprising_pair(5, 8);
    let plan = pair.robot_plan().clone();
    let opts = MceOptions::default();
    c.bench_function("mce/blocks-3", |b| {
        b.iter(|| mce(black_box(&pair), &plan, &opts).unwrap())
    });
}

fn meta(c: &mut Criterion) {
    for name in ["rover", "office"] {
        let exp = experiment(name);
        c.bench_function(&format!("solve/{name}"), |b| {
            b.iter(|| solve(black_box(&exp.mdp), DEFAULT_TOLERANCE).unwrap())
        });
    }
}

fn episodes(c: &mut Criterion) {
    let exp = experiment("office");
    let mut g = c.benchmark_group("run_episode");
    for (name, source) in [("fixed", PolicySource::Fixed), ("recomputed", PolicySource::Recomputed)] {
        g.bench_function(name, |b| {
            let mut seed = 0u64;
            b.iter(|| {
                seed += 1;
                run_episode(&exp, Condition::TrustAware, seed, source).unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, planning, explanation, meta, episodes);
criterion_main!(benches);
