//! Slow reference implementations used to check the real algorithms.
//!
//! Nothing here calls the search, lattice or solver code it is meant to
//! check: states are expanded directly from the action schemas, and policy
//! values come from a plain Gaussian elimination.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use crate::cost::Cost;
use crate::metamdp::TrustMdp;
use crate::planning::{Plan, PlanningModel, State};
use crate::reconcile::{apply_explanation, Message, ModelPair};

/// Exhaustive uniform-cost search over every reachable state. `None` when
/// the goal is unreachable or more than `max_states` states are reachable.
pub fn optimal_cost(model: &PlanningModel, max_states: usize) -> Option<Cost> {
    let mut best: HashMap<State, Cost> = HashMap::new();
    let mut heap = BinaryHeap::new();
    best.insert(model.init().clone(), Cost::ZERO);
    heap.push(Reverse((Cost::ZERO, model.init().clone())));
    while let Some(Reverse((g, s))) = heap.pop() {
        if best.get(&s).is_some_and(|b| *b < g) {
            continue;
        }
        if model.goal().is_subset(&s) {
            return Some(g);
        }
        for a in model.actions() {
            if !a.pre.is_subset(&s) {
                continue;
            }
            let next: State = s.difference(&a.del).cloned().chain(a.add.iter().cloned()).collect();
            let g2 = g + a.cost;
            if best.get(&next).is_none_or(|b| g2 < *b) {
                best.insert(next.clone(), g2);
                if best.len() > max_states {
                    return None;
                }
                heap.push(Reverse((g2, next)));
            }
        }
    }
    None
}

/// Number of states reachable from the initial state, capped at `cap + 1`.
pub fn reachable_states(model: &PlanningModel, cap: usize) -> usize {
    let mut seen: BTreeSet<State> = BTreeSet::from([model.init().clone()]);
    let mut stack = vec![model.init().clone()];
    while let Some(s) = stack.pop() {
        for a in model.actions().filter(|a| a.pre.is_subset(&s)) {
            let next: State = s.difference(&a.del).cloned().chain(a.add.iter().cloned()).collect();
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return seen.len();
                }
                stack.push(next);
            }
        }
    }
    seen.len()
}

/// Cost of executing `plan` step by step in `model`, `None` if a step is
/// inapplicable or the goal does not hold at the end.
pub fn execute(model: &PlanningModel, plan: &Plan) -> Option<Cost> {
    let mut s = model.init().clone();
    let mut total = Cost::ZERO;
    for step in &plan.steps {
        let a = model.action(step)?;
        if !a.pre.is_subset(&s) {
            return None;
        }
        s = s.difference(&a.del).cloned().chain(a.add.iter().cloned()).collect();
        total = total + a.cost;
    }
    model.goal().is_subset(&s).then_some(total)
}

fn optimal_after(pair: &ModelPair, plan: &Plan, messages: &[&Message]) -> bool {
    let model = apply_explanation(pair.human(), messages.iter().copied()).expect("delta messages apply");
    match (execute(&model, plan), optimal_cost(&model, 1_000_000)) {
        (Some(c), Some(best)) => c == best,
        _ => false,
    }
}

/// Checks that `plan` is optimal for the human after `explanation`, that no
/// strict subset of it suffices, and that no smaller subset of the whole
/// model delta suffices either.
pub fn explanation_is_minimal(pair: &ModelPair, plan: &Plan, explanation: &BTreeSet<Message>) -> Result<(), String> {
    let chosen: Vec<&Message> = explanation.iter().collect();
    if !optimal_after(pair, plan, &chosen) {
        return Err("plan is not optimal after the explanation".into());
    }
    let delta: Vec<Message> = pair.delta().messages.into_iter().collect();
    if let Some(m) = chosen.iter().find(|m| !delta.contains(m)) {
        return Err(format!("`{m}` is not part of the model delta"));
    }
    for mask in 0u32..(1 << chosen.len()) - 1 {
        let subset: Vec<&Message> = (0..chosen.len())
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| chosen[i])
            .collect();
        if optimal_after(pair, plan, &subset) {
            return Err(format!("strict subset {subset:?} already suffices"));
        }
    }
    for mask in 0u32..(1 << delta.len()) {
        if (mask.count_ones() as usize) < chosen.len() {
            let subset: Vec<&Message> = (0..delta.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &delta[i])
                .collect();
            if optimal_after(pair, plan, &subset) {
                return Err(format!("smaller explanation {subset:?} suffices"));
            }
        }
    }
    Ok(())
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
fn gauss(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .expect("non-empty system");
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            let (upper, lower) = a.split_at_mut(row);
            for (x, p) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *x -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

/// Expected discounted cost of a stationary deterministic policy, given as
/// one action index per state.
pub fn policy_value(mdp: &TrustMdp, choice: &[usize]) -> Vec<f64> {
    let n = mdp.states();
    let a = (0..n)
        .map(|s| {
            (0..n)
                .map(|t| f64::from(u8::from(s == t)) - mdp.gamma * mdp.transitions[s][choice[s]][t])
                .collect()
        })
        .collect();
    let b = (0..n).map(|s| mdp.costs[s][choice[s]]).collect();
    gauss(a, b)
}

/// Every stationary deterministic policy with its value vector.
pub fn all_policies(mdp: &TrustMdp) -> Vec<(Vec<usize>, Vec<f64>)> {
    let (n, m) = (mdp.states(), mdp.actions.len());
    let mut out = Vec::with_capacity(m.pow(n as u32));
    let mut choice = vec![0; n];
    loop {
        out.push((choice.clone(), policy_value(mdp, &choice)));
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            choice[i] += 1;
            if choice[i] < m {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

/// Pointwise minimum over all stationary deterministic policies.
pub fn optimal_values(mdp: &TrustMdp) -> Vec<f64> {
    let mut best = vec![f64::INFINITY; mdp.states()];
    for (_, v) in all_policies(mdp) {
        for (b, x) in best.iter_mut().zip(v) {
            *b = b.min(x);
        }
    }
    best
}
