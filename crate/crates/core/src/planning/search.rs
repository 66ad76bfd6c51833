//! Optimal forward search over the grounded state space.
//!
//! A* with an admissible, consistent heuristic: the maximum over unmet goal
//! fluents of the cheapest action that adds that fluent. Open-list ties are
//! broken on (f ascending, g descending, action-name sequence ascending), so
//! the returned plan is a pure function of the model.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::atomic::{AtomicBool, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::cost::Cost;
use crate::planning::model::{Plan, PlanningModel};

pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

/// Cooperative cancellation flag shared between a caller and a search.
#[derive(Debug, Clone, Default)]
pub struct CancelToken(Arc<AtomicBool>);

impl CancelToken {
    pub fn new() -> CancelToken {
        CancelToken::default()
    }

    pub fn cancel(&self) {
        self.0.store(true, AtomicOrdering::Relaxed);
    }

    pub fn is_cancelled(&self) -> bool {
        self.0.load(AtomicOrdering::Relaxed)
    }
}

#[derive(Debug, Clone)]
pub struct SearchLimits {
    /// Maximum number of node expansions per search.
    pub node_budget: usize,
    pub cancel: Option<CancelToken>,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_budget: DEFAULT_NODE_BUDGET,
            cancel: None,
        }
    }
}

impl SearchLimits {
    pub fn with_budget(node_budget: usize) -> SearchLimits {
        SearchLimits {
            node_budget,
            cancel: None,
        }
    }

    fn cancelled(&self) -> bool {
        self.cancel.as_ref().is_some_and(CancelToken::is_cancelled)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SearchError {
    #[error("no valid plan exists")]
    Unsolvable,
    #[error("node budget of {budget} expansions exceeded")]
    BudgetExceeded { budget: usize },
    #[error("search cancelled")]
    Cancelled,
}

type Bits = Box<[u64]>;

fn bits_with(len: usize, indices: impl IntoIterator<Item = usize>) -> Bits {
    let mut words = vec![0u64; len.div_ceil(64).max(1)].into_boxed_slice();
    for i in indices {
        words[i / 64] |= 1 << (i % 64);
    }
    words
}

fn subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn has(bits: &[u64], i: usize) -> bool {
    bits[i / 64] & (1 << (i % 64)) != 0
}

struct CompiledAction {
    cost: Cost,
    pre: Bits,
    add: Bits,
    del_mask: Bits,
}

/// Index-based view of a model. Actions are ordered by name so comparing
/// index sequences is the same as comparing name sequences.
struct Compiled {
    names: Vec<String>,
    actions: Vec<CompiledAction>,
    init: Bits,
    goal: Vec<usize>,
    goal_bits: Bits,
    cheapest_achiever: Vec<Option<Cost>>,
}

impl Compiled {
    fn new(model: &PlanningModel) -> Compiled {
        let index: HashMap<&str, usize> = model
            .fluents()
            .iter()
            .enumerate()
            .map(|(i, f)| (f.as_str(), i))
            .collect();
        let n = index.len();
        let to_bits = |set: &std::collections::BTreeSet<String>| bits_with(n, set.iter().map(|f| index[f.as_str()]));
        let mut cheapest_achiever: Vec<Option<Cost>> = vec![None; n];
        let mut names = Vec::new();
        let mut actions = Vec::new();
        for a in model.actions() {
            for f in &a.add {
                let slot = &mut cheapest_achiever[index[f.as_str()]];
                *slot = Some(slot.map_or(a.cost, |c| c.min(a.cost)));
            }
            let del = to_bits(&a.del);
            names.push(a.name.clone());
            actions.push(CompiledAction {
                cost: a.cost,
                pre: to_bits(&a.pre),
                add: to_bits(&a.add),
                del_mask: del.iter().map(|w| !w).collect(),
            });
        }
        let goal: Vec<usize> = model.goal().iter().map(|f| index[f.as_str()]).collect();
        Compiled {
            names,
            actions,
            init: to_bits(model.init()),
            goal_bits: bits_with(n, goal.iter().copied()),
            goal,
            cheapest_achiever,
        }
    }

    fn is_goal(&self, s: &[u64]) -> bool {
        subset(&self.goal_bits, s)
    }

    /// `None` marks a dead end: some unmet goal fluent has no achiever.
    fn heuristic(&self, s: &[u64]) -> Option<Cost> {
        let mut h = Cost::ZERO;
        for &g in &self.goal {
            if !has(s, g) {
                h = h.max(self.cheapest_achiever[g]?);
            }
        }
        Some(h)
    }

    fn successors<'a>(&'a self, s: &'a [u64]) -> impl Iterator<Item = (u32, Bits)> + 'a {
        self.actions.iter().enumerate().filter_map(move |(i, a)| {
            if !subset(&a.pre, s) {
                return None;
            }
            let next: Bits = s
                .iter()
                .zip(a.add.iter().zip(a.del_mask.iter()))
                .map(|(w, (add, keep))| (w | add) & keep)
                .collect();
            Some((i as u32, next))
        })
    }

    fn plan(&self, path: &[u32]) -> Plan {
        Plan::new(path.iter().map(|&i| self.names[i as usize].clone()))
    }
}

struct Node {
    f: Cost,
    g: Cost,
    path: Vec<u32>,
    state: Bits,
}

impl Node {
    fn key_cmp(&self, other: &Node) -> Ordering {
        self.f
            .cmp(&other.f)
            .then_with(|| other.g.cmp(&self.g))
            .then_with(|| self.path.cmp(&other.path))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.key_cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    // BinaryHeap is a max-heap; invert so the smallest key pops first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.key_cmp(self)
    }
}

/// Returns a minimum-cost plan, or the empty plan if the goal already holds.
pub fn optimal_plan(model: &PlanningModel, limits: &SearchLimits) -> Result<Plan, SearchError> {
    let task = Compiled::new(model);
    let Some(h0) = task.heuristic(&task.init) else {
        return Err(SearchError::Unsolvable);
    };
    let mut open = BinaryHeap::new();
    let mut best: HashMap<Bits, (Cost, Vec<u32>)> = HashMap::new();
    let mut closed: HashSet<Bits> = HashSet::new();
    best.insert(task.init.clone(), (Cost::ZERO, Vec::new()));
    open.push(Node {
        f: h0,
        g: Cost::ZERO,
        path: Vec::new(),
        state: task.init.clone(),
    });
    let mut expanded = 0usize;

    while let Some(node) = open.pop() {
        if closed.contains(&node.state) {
            continue;
        }
        if let Some((g, path)) = best.get(&node.state) {
            if *g != node.g || *path != node.path {
                continue;
            }
        }
        if task.is_goal(&node.state) {
            return Ok(task.plan(&node.path));
        }
        if limits.cancelled() {
            return Err(SearchError::Cancelled);
        }
        expanded += 1;
        if expanded > limits.node_budget {
            return Err(SearchError::BudgetExceeded {
                budget: limits.node_budget,
            });
        }
        for (action, next) in task.successors(&node.state) {
            if closed.contains(&next) {
                continue;
            }
            let Some(h) = task.heuristic(&next) else {
                continue;
            };
            let g = node.g + task.actions[action as usize].cost;
            let mut path = node.path.clone();
            path.push(action);
            let improves = match best.get(&next) {
                None => true,
                Some((bg, bp)) => g < *bg || (g == *bg && path < *bp),
            };
            if improves {
                best.insert(next.clone(), (g, path.clone()));
                open.push(Node {
                    f: g + h,
                    g,
                    path,
                    state: next,
                });
            }
        }
        closed.insert(node.state);
    }
    Err(SearchError::Unsolvable)
}

/// Up to `k` distinct loop-free plans in non-decreasing cost order. The first
/// entry is always an optimal plan. Each state is expanded at most `k` times
/// and plans stop at the first state satisfying the goal.
pub fn cheapest_plans(
    model: &PlanningModel,
    k: usize,
    limits: &SearchLimits,
) -> Result<Vec<(Plan, Cost)>, SearchError> {
    let task = Compiled::new(model);
    let mut found = Vec::new();
    if k == 0 {
        return Ok(found);
    }
    let Some(h0) = task.heuristic(&task.init) else {
        return Err(SearchError::Unsolvable);
    };
    struct Entry {
        node: Node,
        trail: Vec<Bits>,
    }
    impl PartialEq for Entry {
        fn eq(&self, o: &Self) -> bool {
            self.node == o.node
        }
    }
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, o: &Self) -> Ordering {
            self.node.cmp(&o.node)
        }
    }

    let mut open = BinaryHeap::new();
    open.push(Entry {
        node: Node {
            f: h0,
            g: Cost::ZERO,
            path: Vec::new(),
            state: task.init.clone(),
        },
        trail: vec![task.init.clone()],
    });
    let mut pops: HashMap<Bits, usize> = HashMap::new();
    let mut expanded = 0usize;

    while let Some(Entry { node, trail }) = open.pop() {
        let count = pops.entry(node.state.clone()).or_insert(0);
        if *count >= k {
            continue;
        }
        *count += 1;
        if task.is_goal(&node.state) {
            found.push((task.plan(&node.path), node.g));
            if found.len() == k {
                break;
            }
            continue;
        }
        if limits.cancelled() {
            return Err(SearchError::Cancelled);
        }
        expanded += 1;
        if expanded > limits.node_budget {
            return Err(SearchError::BudgetExceeded {
                budget: limits.node_budget,
            });
        }
        for (action, next) in task.successors(&node.state) {
            if trail.contains(&next) {
                continue;
            }
            let Some(h) = task.heuristic(&next) else {
                continue;
            };
            let g = node.g + task.actions[action as usize].cost;
            let mut path = node.path.clone();
            path.push(action);
            let mut next_trail = trail.clone();
            next_trail.push(next.clone());
            open.push(Entry {
                node: Node {
                    f: g + h,
                    g,
                    path,
                    state: next,
                },
                trail: next_trail,
            });
        }
    }
    if found.is_empty() {
        return Err(SearchError::Unsolvable);
    }
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::ExtCost;
    use crate::planning::model::{plan_cost, ActionSchema};
    use std::collections::BTreeSet;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn grid3() -> PlanningModel {
        let mut fluents = BTreeSet::new();
        let mut actions = Vec::new();
        for r in 0..3 {
            for c in 0..3 {
                fluents.insert(format!("at-{r}-{c}"));
                for (dr, dc) in [(0i32, 1i32), (1, 0), (0, -1), (-1, 0)] {
                    let (nr, nc) = (r + dr, c + dc);
                    if (0..3).contains(&nr) && (0..3).contains(&nc) {
                        let from = format!("at-{r}-{c}");
                        let to = format!("at-{nr}-{nc}");
                        actions.push(ActionSchema::new(
                            &format!("move-{r}-{c}-{nr}-{nc}"),
                            Cost::ONE,
                            vec![from.clone()],
                            vec![to],
                            vec![from],
                        ));
                    }
                }
            }
        }
        PlanningModel::new(fluents, actions, set(&["at-0-0"]), set(&["at-2-2"])).unwrap()
    }

    #[test]
    fn goal_already_holds_gives_empty_plan() {
        let m = PlanningModel::new(set(&["g"]), vec![], set(&["g"]), set(&["g"])).unwrap();
        assert_eq!(optimal_plan(&m, &SearchLimits::default()).unwrap(), Plan::empty());
    }

    #[test]
    fn grid_corner_to_corner_costs_four() {
        let m = grid3();
        let plan = optimal_plan(&m, &SearchLimits::default()).unwrap();
        assert_eq!(plan.len(), 4);
        assert_eq!(plan_cost(&m, &plan), ExtCost::Finite(Cost::from_int(4)));
        // deterministic: lexicographically smallest action sequence among optima
        assert_eq!(plan, optimal_plan(&m, &SearchLimits::default()).unwrap());
        assert_eq!(plan.steps[0], "move-0-0-0-1");
    }

    #[test]
    fn unsolvable_and_budget() {
        let m = PlanningModel::new(set(&["g", "h"]), vec![], set(&[]), set(&["g"])).unwrap();
        assert_eq!(optimal_plan(&m, &SearchLimits::default()), Err(SearchError::Unsolvable));
        assert_eq!(
            optimal_plan(&grid3(), &SearchLimits::with_budget(2)),
            Err(SearchError::BudgetExceeded { budget: 2 })
        );
    }

    #[test]
    fn cancellation_is_observed() {
        let token = CancelToken::new();
        token.cancel();
        let limits = SearchLimits {
            node_budget: 100,
            cancel: Some(token),
        };
        assert_eq!(optimal_plan(&grid3(), &limits), Err(SearchError::Cancelled));
    }

    #[test]
    fn cheapest_plans_are_sorted_and_distinct() {
        let m = grid3();
        let plans = cheapest_plans(&m, 5, &SearchLimits::default()).unwrap();
        assert_eq!(plans.len(), 5);
        assert_eq!(plans[0].0, optimal_plan(&m, &SearchLimits::default()).unwrap());
        for w in plans.windows(2) {
            assert!(w[0].1 <= w[1].1);
            assert_ne!(w[0].0, w[1].0);
        }
        for (p, c) in &plans {
            assert_eq!(plan_cost(&m, p), ExtCost::Finite(*c));
        }
    }
}
