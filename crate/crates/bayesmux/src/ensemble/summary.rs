//! Weighted summaries of pooled goal draws.

use super::combine::WeightedPosterior;
use crate::stats::weighted_quantile;

/// Moments and quantiles of one goal component.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
pub struct SummaryStats {
    pub mean: f64,
    pub sd: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

/// Weighted mean / sd / quantiles for every component of `goal`. Quantiles
/// use the lower-step convention. Returns `None` for unknown goals.
pub fn weighted_summary(wp: &WeightedPosterior, goal: &str) -> Option<Vec<SummaryStats>> {
    let gi = wp.goal_index(goal)?;
    let len = wp.goal_lens[gi];
    let mut out = Vec::with_capacity(len);
    for component in 0..len {
        let mut vw = wp.component_draws(gi, component);
        let total: f64 = vw.iter().map(|(_, w)| w).sum();
        let mean: f64 = vw.iter().map(|(v, w)| v * w).sum::<f64>() / total;
        let var: f64 = vw
            .iter()
            .map(|(v, w)| w * (v - mean) * (v - mean))
            .sum::<f64>()
            / total;
        out.push(SummaryStats {
            mean,
            sd: var.max(0.0).sqrt(),
            q05: weighted_quantile(&mut vw, 0.05),
            q50: weighted_quantile(&mut vw, 0.50),
            q95: weighted_quantile(&mut vw, 0.95),
        });
    }
    Some(out)
}
