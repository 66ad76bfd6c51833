//! Random instances for tests and benchmarks: grid maps, blocks worlds,
//! perturbed model pairs and raw decision processes.

use std::collections::{BTreeSet, VecDeque};

use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::cost::Cost;
use crate::grid::{GridCosts, GridMap};
use crate::metamdp::TrustMdp;
use crate::planning::{ActionSchema, PlanningModel, SearchLimits};
use crate::reconcile::{MessageCosts, ModelPair};
use crate::StrategyTag;

/// An `h` by `w` map (border included) with random walls and passable
/// rubble. Objective cells are placed only where the start can reach them.
pub fn random_grid<R: Rng + ?Sized>(rng: &mut R, h: usize, w: usize, delivery: bool) -> GridMap {
    assert!(h >= 3 && w >= 3 && (h - 2) * (w - 2) >= 3);
    loop {
        let mut g = vec![vec!['#'; w]; h];
        for row in g.iter_mut().take(h - 1).skip(1) {
            for cell in row.iter_mut().take(w - 1).skip(1) {
                let x: f64 = rng.random();
                *cell = if x < 0.2 {
                    '#'
                } else if x < 0.3 {
                    'r'
                } else {
                    '.'
                };
            }
        }
        let open: Vec<(usize, usize)> = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .filter(|&(r, c)| g[r][c] != '#')
            .collect();
        let Some(&start) = open.choose(rng) else { continue };
        let mut seen = vec![vec![false; w]; h];
        let mut queue = VecDeque::from([start]);
        seen[start.0][start.1] = true;
        let mut reach = Vec::new();
        while let Some((r, c)) = queue.pop_front() {
            reach.push((r, c));
            for (dr, dc) in [(-1i32, 0i32), (1, 0), (0, -1), (0, 1)] {
                let (nr, nc) = ((r as i32 + dr) as usize, (c as i32 + dc) as usize);
                if g[nr][nc] != '#' && !seen[nr][nc] {
                    seen[nr][nc] = true;
                    queue.push_back((nr, nc));
                }
            }
        }
        let need = if delivery { 3 } else { 2 };
        if reach.len() < need {
            continue;
        }
        reach.retain(|&p| p != start);
        reach.shuffle(rng);
        g[start.0][start.1] = 'S';
        if delivery {
            g[reach[0].0][reach[0].1] = 'C';
            g[reach[1].0][reach[1].1] = 'D';
        } else {
            g[reach[0].0][reach[0].1] = 'G';
        }
        let text: String = g.iter().map(|row| row.iter().collect::<String>() + "\n").collect();
        return GridMap::parse(&text).expect("generated maps are well formed");
    }
}

pub fn random_grid_model<R: Rng + ?Sized>(rng: &mut R, h: usize, w: usize) -> PlanningModel {
    let delivery = rng.random_bool(0.5);
    random_grid(rng, h, w, delivery)
        .to_model(&GridCosts::default())
        .expect("generated maps compile")
}

/// A blocks world over `n` blocks with random initial and goal towers and
/// per-action costs drawn from 1..=3.
pub fn blocks_world<R: Rng + ?Sized>(rng: &mut R, n: usize) -> PlanningModel {
    assert!(n >= 1);
    let blocks: Vec<String> = (0..n).map(|i| format!("b{i}")).collect();
    let on = |a: &str, b: &str| format!("on-{a}-{b}");
    let mut fluents = BTreeSet::from(["hand-empty".to_string()]);
    for a in &blocks {
        fluents.insert(format!("clear-{a}"));
        fluents.insert(format!("table-{a}"));
        fluents.insert(format!("holding-{a}"));
        for b in &blocks {
            if a != b {
                fluents.insert(on(a, b));
            }
        }
    }
    let mut cost = || Cost::from_int(rng.random_range(1..=3));
    let mut actions = Vec::new();
    for a in &blocks {
        let (clear, table, holding) = (format!("clear-{a}"), format!("table-{a}"), format!("holding-{a}"));
        actions.push(ActionSchema::new(
            &format!("pickup-{a}"),
            cost(),
            vec![clear.clone(), table.clone(), "hand-empty".into()],
            vec![holding.clone()],
            vec![clear.clone(), table.clone(), "hand-empty".into()],
        ));
        actions.push(ActionSchema::new(
            &format!("putdown-{a}"),
            cost(),
            vec![holding.clone()],
            vec![clear.clone(), table.clone(), "hand-empty".into()],
            vec![holding.clone()],
        ));
        for b in blocks.iter().filter(|b| *b != a) {
            let clear_b = format!("clear-{b}");
            actions.push(ActionSchema::new(
                &format!("stack-{a}-{b}"),
                cost(),
                vec![holding.clone(), clear_b.clone()],
                vec![on(a, b), clear.clone(), "hand-empty".into()],
                vec![holding.clone(), clear_b.clone()],
            ));
            actions.push(ActionSchema::new(
                &format!("unstack-{a}-{b}"),
                cost(),
                vec![on(a, b), clear.clone(), "hand-empty".into()],
                vec![holding.clone(), clear_b.clone()],
                vec![on(a, b), clear.clone(), "hand-empty".into()],
            ));
        }
    }
    let towers = |rng: &mut R| -> BTreeSet<String> {
        let mut order = blocks.clone();
        order.shuffle(rng);
        let mut facts = BTreeSet::new();
        let mut below: Option<String> = None;
        for b in order {
            match below.take() {
                Some(u) if rng.random_bool(0.6) => {
                    facts.insert(on(&b, &u));
                    facts.remove(&format!("clear-{u}"));
                }
                _ => {
                    facts.insert(format!("table-{b}"));
                }
            }
            facts.insert(format!("clear-{b}"));
            below = Some(b);
        }
        facts
    };
    let mut init = towers(rng);
    init.insert("hand-empty".into());
    let goal: BTreeSet<String> = towers(rng).into_iter().filter(|f| f.starts_with("on-")).collect();
    PlanningModel::new(fluents, actions, init, goal).expect("blocks world is well formed")
}

/// The model a human would hold after `count` random single-slot edits of
/// `robot`: cost changes, dropped or added preconditions and dropped init
/// facts. Each edit touches a distinct slot.
pub fn perturb<R: Rng + ?Sized>(rng: &mut R, robot: &PlanningModel, count: usize) -> PlanningModel {
    let fluents: Vec<&String> = robot.fluents().iter().collect();
    let mut actions: Vec<ActionSchema> = robot.actions().cloned().collect();
    let mut init = robot.init().clone();
    let mut touched = BTreeSet::new();
    let mut done = 0;
    let mut attempts = 0;
    while done < count && attempts < 50 * (count + 1) {
        attempts += 1;
        let i = rng.random_range(0..actions.len());
        let a = &mut actions[i];
        let slot = match rng.random_range(0..4) {
            0 => {
                let c = Cost::from_int(rng.random_range(1..=6));
                if c == a.cost || !touched.insert((0, a.name.clone(), String::new())) {
                    continue;
                }
                a.cost = c;
                true
            }
            1 => {
                let Some(f) = a.pre.iter().collect::<Vec<_>>().choose(rng).map(|f| (*f).clone()) else {
                    continue;
                };
                if !touched.insert((1, a.name.clone(), f.clone())) {
                    continue;
                }
                a.pre.remove(&f)
            }
            2 => {
                let f = (*fluents.choose(rng).expect("fluents exist")).clone();
                if a.pre.contains(&f) || !touched.insert((1, a.name.clone(), f.clone())) {
                    continue;
                }
                a.pre.insert(f)
            }
            _ => {
                let Some(f) = init.iter().collect::<Vec<_>>().choose(rng).map(|f| (*f).clone()) else {
                    continue;
                };
                if !touched.insert((3, f.clone(), String::new())) {
                    continue;
                }
                init.remove(&f)
            }
        };
        if slot {
            done += 1;
        }
    }
    PlanningModel::new(robot.fluents().clone(), actions, init, robot.goal().clone())
        .expect("edits keep the model well formed")
}

/// A model pair whose delta has between 1 and `max_delta` messages, built by
/// perturbing models from `base` until both sides are solvable.
pub fn random_pair<R: Rng + ?Sized>(
    rng: &mut R,
    max_delta: usize,
    limits: &SearchLimits,
    mut base: impl FnMut(&mut R) -> PlanningModel,
) -> ModelPair {
    loop {
        let robot = base(rng);
        let edits = rng.random_range(1..=max_delta);
        let human = perturb(rng, &robot, edits);
        let costs = MessageCosts::uniform(Cost::from_int(rng.random_range(1..=4)));
        if let Ok(pair) = ModelPair::new(robot, human, costs, limits) {
            let n = pair.delta().len();
            if (1..=max_delta).contains(&n) {
                return pair;
            }
        }
    }
}

/// A random decision process over `states` levels and the three strategies,
/// with stochastic rows and costs in `[0, 50)`.
pub fn random_mdp<R: Rng + ?Sized>(rng: &mut R, states: usize, gamma: f64) -> TrustMdp {
    let actions = StrategyTag::ALL.to_vec();
    let transitions = (0..states)
        .map(|_| {
            actions
                .iter()
                .map(|_| {
                    let raw: Vec<f64> = (0..states).map(|_| rng.random::<f64>() + 1e-3).collect();
                    let sum: f64 = raw.iter().sum();
                    raw.iter().map(|x| x / sum).collect()
                })
                .collect()
        })
        .collect();
    let costs = (0..states)
        .map(|_| actions.iter().map(|_| rng.random_range(0.0..50.0)).collect())
        .collect();
    TrustMdp::from_parts(actions, transitions, costs, gamma).expect("generated tables are valid")
}
