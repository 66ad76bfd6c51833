use serde::Serialize;

/// Posterior-mean monitoring probabilities per trust level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OmegaEstimate {
    pub per_level: Vec<f64>,
    /// `(monitored, total)` rounds per level.
    pub counts: Vec<(u64, u64)>,
    pub alpha: f64,
    /// Levels with no observations, which report the prior mean.
    pub low_confidence: Vec<bool>,
}

/// Estimates `omega(i)` from `(level, monitored)` observations under an
/// independent Beta(alpha, alpha) prior per level:
/// `(monitored + alpha) / (total + 2 alpha)`.
pub fn estimate_omega(observations: impl IntoIterator<Item = (usize, bool)>, alpha: f64, k: usize) -> OmegaEstimate {
    let mut counts = vec![(0u64, 0u64); k];
    for (level, monitored) in observations {
        if level == 0 || level > k {
            continue;
        }
        let c = &mut counts[level - 1];
        c.1 += 1;
        if monitored {
            c.0 += 1;
        }
    }
    let per_level = counts
        .iter()
        .map(|&(m, n)| {
            if n == 0 {
                0.5
            } else {
                (m as f64 + alpha) / (n as f64 + 2.0 * alpha)
            }
        })
        .collect();
    OmegaEstimate {
        per_level,
        low_confidence: counts.iter().map(|c| c.1 == 0).collect(),
        counts,
        alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_logs_give_the_flagged_prior() {
        let e = estimate_omega([], 1.0, 4);
        assert_eq!(e.per_level, vec![0.5; 4]);
        assert!(e.low_confidence.iter().all(|f| *f));
    }

    #[test]
    fn posterior_mean_closed_form() {
        let obs = (0..1000).map(|i| (1, i < 721));
        let e = estimate_omega(obs, 1.0, 4);
        assert_eq!(e.counts[0], (721, 1000));
        assert!((e.per_level[0] - 722.0 / 1002.0).abs() < 1e-15);
        assert!((e.per_level[0] - 0.7206).abs() < 1e-4);
        assert!(!e.low_confidence[0]);
        assert!(e.low_confidence[1]);
    }
}
