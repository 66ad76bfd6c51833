//! The three per-task strategies: perfectly explicable, balanced and optimal.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{Cost, ExtCost, Score};
use crate::planning::{cheapest_plans, plan_cost, Plan, SearchLimits};
use crate::reconcile::mce::{mce_in, Lattice};
use crate::reconcile::{ExplicabilityMetric, Message, ModelPair, ReconcileError, DEFAULT_MCE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StrategyTag {
    Explicable,
    Balanced,
    Optimal,
}

impl StrategyTag {
    pub const ALL: [StrategyTag; 3] = [StrategyTag::Explicable, StrategyTag::Balanced, StrategyTag::Optimal];

    pub fn short(self) -> &'static str {
        match self {
            StrategyTag::Explicable => "exp",
            StrategyTag::Balanced => "bal",
            StrategyTag::Optimal => "opt",
        }
    }
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StrategyTag::Explicable => "explicable",
            StrategyTag::Balanced => "balanced",
            StrategyTag::Optimal => "optimal",
        })
    }
}

impl std::str::FromStr for StrategyTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "explicable" | "exp" => Ok(StrategyTag::Explicable),
            "balanced" | "bal" => Ok(StrategyTag::Balanced),
            "optimal" | "opt" => Ok(StrategyTag::Optimal),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}

/// A plan paired with the explanation delivered before executing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnnotatedPlan {
    pub tag: StrategyTag,
    pub plan: Plan,
    pub explanation: BTreeSet<Message>,
    pub explanation_cost: Cost,
    /// Cost of the plan in the robot model.
    pub plan_cost: ExtCost,
    /// Explanation cost plus plan cost.
    pub execution_cost: ExtCost,
    /// Score against the human model updated by the explanation.
    pub explicability: Score,
}

impl AnnotatedPlan {
    pub fn is_perfectly_explicable(&self) -> bool {
        self.explicability.is_perfect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrategyTriple {
    pub explicable: AnnotatedPlan,
    pub balanced: AnnotatedPlan,
    pub optimal: AnnotatedPlan,
}

impl StrategyTriple {
    pub fn get(&self, tag: StrategyTag) -> &AnnotatedPlan {
        match tag {
            StrategyTag::Explicable => &self.explicable,
            StrategyTag::Balanced => &self.balanced,
            StrategyTag::Optimal => &self.optimal,
        }
    }

    /// Both chains `C_e(exp) >= C_e(bal) >= C_e(opt)` and
    /// `EX(exp) >= EX(bal) >= EX(opt)`.
    pub fn dominance_holds(&self) -> bool {
        let (e, b, o) = (&self.explicable, &self.balanced, &self.optimal);
        e.execution_cost >= b.execution_cost
            && b.execution_cost >= o.execution_cost
            && e.explicability >= b.explicability
            && b.explicability >= o.explicability
    }
}

#[derive(Debug, Clone)]
pub struct StrategyOptions {
    /// Weight on the explicability penalty in the balanced objective.
    pub balance_weight: Cost,
    /// Number of cheapest robot plans considered for the balanced strategy.
    pub candidate_budget: usize,
    pub metric: ExplicabilityMetric,
    pub mce_cap: usize,
    pub limits: SearchLimits,
}

impl Default for StrategyOptions {
    fn default() -> Self {
        StrategyOptions {
            balance_weight: Cost::ONE,
            candidate_budget: 5,
            metric: ExplicabilityMetric::HumanModelDiff,
            mce_cap: DEFAULT_MCE_CAP,
            limits: SearchLimits::default(),
        }
    }
}

struct Scorer<'p, 'l> {
    pair: &'p ModelPair,
    lattice: &'l mut Lattice<'p>,
    metric: ExplicabilityMetric,
    limits: &'l SearchLimits,
}

impl Scorer<'_, '_> {
    fn annotate(&mut self, tag: StrategyTag, plan: &Plan, mask: u32) -> Result<AnnotatedPlan, ReconcileError> {
        let explanation_cost = self.lattice.cost(mask);
        let robot_cost = plan_cost(self.pair.robot(), plan);
        let explicability = match self.metric {
            ExplicabilityMetric::HumanModelDiff => match self.lattice.plan_cost(mask, plan)? {
                ExtCost::Infinite => Score::NegInfinity,
                ExtCost::Finite(c) => Score::Finite(self.lattice.optimum(mask, self.limits)? - c),
            },
            ExplicabilityMetric::RobotModelDiff => match robot_cost {
                ExtCost::Infinite => Score::NegInfinity,
                ExtCost::Finite(c) => Score::Finite(self.pair.robot_cost() - c),
            },
        };
        Ok(AnnotatedPlan {
            tag,
            plan: plan.clone(),
            explanation: self.lattice.subset(mask),
            explanation_cost,
            plan_cost: robot_cost,
            execution_cost: robot_cost + explanation_cost,
            explicability,
        })
    }
}

/// Balanced objective `C_e + weight * (-EX)`; `None` when the score is
/// negative infinity or the plan is invalid.
fn objective(p: &AnnotatedPlan, weight: Cost) -> Option<Cost> {
    let ce = p.execution_cost.finite()?;
    match p.explicability {
        Score::NegInfinity => None,
        Score::Finite(ex) => Some(ce - ex * weight),
    }
}

fn cmp_candidates(a: &AnnotatedPlan, b: &AnnotatedPlan, weight: Cost) -> Ordering {
    let key = |p: &AnnotatedPlan| objective(p, weight).map_or(ExtCost::Infinite, ExtCost::Finite);
    key(a)
        .cmp(&key(b))
        .then_with(|| a.execution_cost.cmp(&b.execution_cost))
        .then_with(|| b.explicability.cmp(&a.explicability))
        .then_with(|| a.plan.cmp(&b.plan))
        .then_with(|| a.explanation.cmp(&b.explanation))
}

/// Builds the explicable, balanced and optimal strategies for one task.
///
/// * explicable: the cheapest perfectly explicable option among the human's
///   expected plan without explanation and each robot-optimal plan with its
///   minimally complete explanation;
/// * optimal: the robot's optimal plan with no explanation;
/// * balanced: the minimiser of `C_e + weight * (-EX)` over the cheapest
///   robot plans crossed with every subset of the model delta, restricted to
///   candidates lying between the two endpoints on both axes (the endpoints
///   themselves are always candidates).
pub fn strategy_triple(pair: &ModelPair, opts: &StrategyOptions) -> Result<StrategyTriple, ReconcileError> {
    let limits = &opts.limits;
    let mut lattice = Lattice::new(pair, opts.mce_cap)?;
    let full_mask: u32 = if lattice.size() == 0 {
        0
    } else {
        (1u32 << lattice.size()) - 1
    };

    let plans = cheapest_plans(pair.robot(), opts.candidate_budget.max(1), limits).map_err(ReconcileError::Robot)?;
    let robot_optimal: Vec<&Plan> = plans
        .iter()
        .filter(|(_, c)| *c == pair.robot_cost())
        .map(|(p, _)| p)
        .collect();

    let mut explicable_options: Vec<(Plan, u32)> = vec![(pair.expected_plan().clone(), 0)];
    for plan in std::iter::once(pair.robot_plan()).chain(robot_optimal.iter().copied()) {
        let e = mce_in(&mut lattice, plan, limits)?;
        let mask = lattice
            .messages
            .iter()
            .enumerate()
            .filter(|(_, m)| e.contains(*m))
            .fold(0u32, |acc, (i, _)| acc | (1 << i));
        explicable_options.push((plan.clone(), mask));
    }

    let mut scorer = Scorer {
        pair,
        lattice: &mut lattice,
        metric: opts.metric,
        limits,
    };

    let mut explicable: Option<AnnotatedPlan> = None;
    for (plan, mask) in &explicable_options {
        let candidate = scorer.annotate(StrategyTag::Explicable, plan, *mask)?;
        let better = match &explicable {
            None => true,
            Some(best) => {
                (candidate.execution_cost, candidate.explanation.len(), &candidate.plan)
                    < (best.execution_cost, best.explanation.len(), &best.plan)
            }
        };
        if better {
            explicable = Some(candidate);
        }
    }
    let explicable = explicable.expect("at least one explicable option");
    let optimal = scorer.annotate(StrategyTag::Optimal, pair.robot_plan(), 0)?;

    let mut pool: Vec<Plan> = plans.iter().map(|(p, _)| p.clone()).collect();
    if plan_cost(pair.robot(), pair.expected_plan()).is_finite() {
        pool.push(pair.expected_plan().clone());
    }
    pool.sort();
    pool.dedup();

    let within = |c: &AnnotatedPlan| {
        c.execution_cost <= explicable.execution_cost
            && c.execution_cost >= optimal.execution_cost
            && c.explicability <= explicable.explicability
            && c.explicability >= optimal.explicability
    };
    let weight = opts.balance_weight;
    let mut candidates = vec![explicable.clone(), optimal.clone()];
    for plan in &pool {
        for mask in 0..=full_mask {
            let c = scorer.annotate(StrategyTag::Balanced, plan, mask)?;
            if c.execution_cost.is_finite() && within(&c) {
                candidates.push(c);
            }
        }
    }
    // Candidates with -inf explicability are only eligible when nothing else is.
    let any_finite = candidates.iter().any(|c| objective(c, weight).is_some());
    let mut balanced = candidates
        .into_iter()
        .filter(|c| !any_finite || objective(c, weight).is_some())
        .min_by(|a, b| cmp_candidates(a, b, weight))
        .expect("endpoints are always candidates");
    balanced.tag = StrategyTag::Balanced;

    Ok(StrategyTriple {
        explicable,
        balanced,
        optimal,
    })
}
