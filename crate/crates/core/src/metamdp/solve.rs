use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::metamdp::{MetaError, TrustMdp};
use crate::reconcile::StrategyTag;

pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetaPolicy {
    pub choice: Vec<StrategyTag>,
    /// Expected discounted cost from each state.
    pub value: Vec<f64>,
    /// `-value`, for reports that speak of expected value rather than cost.
    pub reported_value: Vec<f64>,
    pub iterations: usize,
}

impl MetaPolicy {
    pub fn short(&self) -> String {
        let parts: Vec<&str> = self.choice.iter().map(|c| c.short()).collect();
        format!("[{}]", parts.join(", "))
    }
}

fn q_values(mdp: &TrustMdp, v: &[f64]) -> Vec<Vec<f64>> {
    (0..mdp.states())
        .map(|s| {
            (0..mdp.actions.len())
                .map(|a| {
                    let future: f64 = mdp.transitions[s][a].iter().zip(v).map(|(p, x)| p * x).sum();
                    mdp.costs[s][a] + mdp.gamma * future
                })
                .collect()
        })
        .collect()
}

/// Value iteration until the Bellman residual drops below
/// `tol * (1 - gamma) / gamma`, which bounds the value error by `tol`.
///
/// The greedy policy breaks ties within `tol` in favour of explicable, then
/// balanced, then optimal.
pub fn solve(mdp: &TrustMdp, tol: f64) -> Result<MetaPolicy, MetaError> {
    if !(0.0..1.0).contains(&mdp.gamma) {
        return Err(MetaError::Discount(mdp.gamma));
    }
    let k = mdp.states();
    let threshold = if mdp.gamma == 0.0 {
        f64::INFINITY
    } else {
        tol * (1.0 - mdp.gamma) / mdp.gamma
    };
    let mut v = vec![0.0; k];
    let mut iterations = 0;
    loop {
        iterations += 1;
        let next: Vec<f64> = q_values(mdp, &v)
            .iter()
            .map(|q| q.iter().copied().fold(f64::INFINITY, f64::min))
            .collect();
        let residual = next.iter().zip(&v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        v = next;
        if residual < threshold {
            break;
        }
    }
    let q = q_values(mdp, &v);
    let choice = q
        .iter()
        .map(|row| {
            let best = row.iter().copied().fold(f64::INFINITY, f64::min);
            (0..row.len())
                .filter(|&a| row[a] - best <= tol)
                .map(|a| mdp.actions[a])
                .min()
                .expect("non-empty action set")
        })
        .collect();
    Ok(MetaPolicy {
        choice,
        reported_value: v.iter().map(|x| -x).collect(),
        value: v,
        iterations,
    })
}

/// Exact discounted cost of a stationary policy from a direct solve of
/// `(I - gamma P) V = C`.
pub fn evaluate_policy(mdp: &TrustMdp, choice: &[StrategyTag]) -> Result<Vec<f64>, MetaError> {
    let k = mdp.states();
    if choice.len() != k {
        return Err(MetaError::PolicyLength {
            expected: k,
            got: choice.len(),
        });
    }
    let idx = choice
        .iter()
        .map(|&t| mdp.action_index(t).ok_or(MetaError::UnknownAction { strategy: t }))
        .collect::<Result<Vec<_>, _>>()?;
    let a = DMatrix::from_fn(k, k, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id - mdp.gamma * mdp.transitions[i][idx[i]][j]
    });
    let c = DVector::from_fn(k, |i, _| mdp.costs[i][idx[i]]);
    let v = a.lu().solve(&c).ok_or(MetaError::Discount(mdp.gamma))?;
    Ok(v.iter().copied().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_absorbing_state_is_a_geometric_series() {
        let mdp =
            TrustMdp::from_parts(vec![StrategyTag::Optimal], vec![vec![vec![1.0]]], vec![vec![2.5]], 0.9).unwrap();
        let p = solve(&mdp, 1e-10).unwrap();
        assert!((p.value[0] - 25.0).abs() < 1e-9);
        assert_eq!(p.reported_value[0], -p.value[0]);
        assert!((evaluate_policy(&mdp, &p.choice).unwrap()[0] - 25.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_chain_matches_hand_recursion() {
        // s1 -> s2 -> s3 at cost 1 each; s3 absorbs at cost 0.
        let tag = StrategyTag::Explicable;
        let t = vec![
            vec![vec![0.0, 1.0, 0.0]],
            vec![vec![0.0, 0.0, 1.0]],
            vec![vec![0.0, 0.0, 1.0]],
        ];
        let mdp = TrustMdp::from_parts(vec![tag], t, vec![vec![1.0], vec![1.0], vec![0.0]], 0.9).unwrap();
        let v = evaluate_policy(&mdp, &[tag; 3]).unwrap();
        assert!((v[2] - 0.0).abs() < 1e-12);
        assert!((v[1] - 1.0).abs() < 1e-12);
        assert!((v[0] - 1.9).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_trust_building() {
        let t = vec![vec![vec![1.0], vec![1.0]]];
        let mdp = TrustMdp::from_parts(
            vec![StrategyTag::Optimal, StrategyTag::Explicable],
            t,
            vec![vec![3.0, 3.0]],
            0.5,
        )
        .unwrap();
        assert_eq!(solve(&mdp, 1e-9).unwrap().choice, vec![StrategyTag::Explicable]);
    }

    #[test]
    fn zero_discount_is_myopic() {
        let t = vec![
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![0.0, 1.0], vec![0.0, 1.0]],
        ];
        let mdp = TrustMdp::from_parts(
            vec![StrategyTag::Explicable, StrategyTag::Optimal],
            t,
            vec![vec![5.0, 1.0], vec![0.5, 2.0]],
            0.0,
        )
        .unwrap();
        let p = solve(&mdp, 1e-9).unwrap();
        assert_eq!(p.choice, vec![StrategyTag::Optimal, StrategyTag::Explicable]);
        assert_eq!(p.value, vec![1.0, 0.5]);
    }

    #[test]
    fn malformed_tables_are_rejected() {
        let bad_row = TrustMdp::from_parts(vec![StrategyTag::Optimal], vec![vec![vec![0.5]]], vec![vec![1.0]], 0.9);
        assert!(matches!(bad_row, Err(MetaError::InvalidScenario(_))));
        let bad_cost = TrustMdp::from_parts(
            vec![StrategyTag::Optimal],
            vec![vec![vec![1.0]]],
            vec![vec![f64::INFINITY]],
            0.9,
        );
        assert!(matches!(bad_cost, Err(MetaError::NonFiniteCost { .. })));
        let bad_gamma = TrustMdp::from_parts(vec![StrategyTag::Optimal], vec![vec![vec![1.0]]], vec![vec![1.0]], 1.0);
        assert_eq!(bad_gamma, Err(MetaError::Discount(1.0)));
    }
}
