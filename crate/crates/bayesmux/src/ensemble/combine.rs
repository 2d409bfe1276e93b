//! Pooling per-model posteriors into one weighted posterior over the shared
//! goal variables.
//!
//! Model n contributes every retained draw with per-draw weight w_n / K_n,
//! where K_n is its retained draw count. The pooled mixture mean is then
//! exactly the weight-average of per-model means, whatever the K_n are. The
//! flat baseline is the same pool with uniform model weights.

use super::weights::WeightVector;
use super::EnsembleError;
use crate::density::LogDensityFn;
use crate::mcmc::PosteriorSamples;

/// One model's contribution to a pooled posterior.
#[derive(Debug, Clone)]
pub struct ModelPosterior<'a> {
    pub model_id: String,
    pub density: &'a LogDensityFn,
    pub samples: &'a PosteriorSamples,
}

/// All goal draws of one model sharing a common per-draw weight.
#[derive(Debug, Clone)]
pub struct ModelGoalDraws {
    pub model_id: String,
    pub per_draw_weight: f64,
    /// `[draw][goal][component]`
    pub draws: Vec<Vec<Vec<f64>>>,
}

/// A mixture of per-model posteriors over the shared goals; per-draw weights
/// sum to one.
#[derive(Debug, Clone)]
pub struct WeightedPosterior {
    pub goal_names: Vec<String>,
    pub goal_lens: Vec<usize>,
    pub models: Vec<ModelGoalDraws>,
}

impl WeightedPosterior {
    pub fn total_weight(&self) -> f64 {
        self.models
            .iter()
            .map(|m| m.per_draw_weight * m.draws.len() as f64)
            .sum()
    }

    pub fn goal_index(&self, goal: &str) -> Option<usize> {
        self.goal_names.iter().position(|g| g == goal)
    }

    /// (value, weight) pairs of one goal component across the whole pool.
    pub fn component_draws(&self, goal_idx: usize, component: usize) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for m in &self.models {
            for d in &m.draws {
                out.push((d[goal_idx][component], m.per_draw_weight));
            }
        }
        out
    }
}

fn check_goals(
    posteriors: &[ModelPosterior<'_>],
) -> Result<(Vec<String>, Vec<usize>), EnsembleError> {
    assert!(!posteriors.is_empty(), "no posteriors to combine");
    let names = posteriors[0].density.goal_names();
    let lens = posteriors[0].density.goal_lens();
    for p in &posteriors[1..] {
        if p.density.goal_names() != names || p.density.goal_lens() != lens {
            return Err(EnsembleError::GoalShapeMismatch {
                message: format!(
                    "model `{}` exposes goals {:?} with lengths {:?}, expected {:?} with {:?}",
                    p.model_id,
                    p.density.goal_names(),
                    p.density.goal_lens(),
                    names,
                    lens
                ),
            });
        }
    }
    Ok((names, lens))
}

fn pool(
    posteriors: &[ModelPosterior<'_>],
    model_weights: &[f64],
) -> Result<WeightedPosterior, EnsembleError> {
    let (goal_names, goal_lens) = check_goals(posteriors)?;
    let mut models = Vec::with_capacity(posteriors.len());
    for (p, &w) in posteriors.iter().zip(model_weights.iter()) {
        let draws: Vec<Vec<Vec<f64>>> = p
            .samples
            .flat_constrained()
            .map(|v| p.density.eval_goals(v))
            .collect();
        let k = draws.len();
        assert!(k > 0, "model `{}` has no retained draws", p.model_id);
        models.push(ModelGoalDraws {
            model_id: p.model_id.clone(),
            per_draw_weight: w / k as f64,
            draws,
        });
    }
    Ok(WeightedPosterior {
        goal_names,
        goal_lens,
        models,
    })
}

/// Pool posteriors under explicit model weights.
pub fn combine(
    posteriors: &[ModelPosterior<'_>],
    w: &WeightVector,
) -> Result<WeightedPosterior, EnsembleError> {
    if posteriors.len() != w.len() {
        return Err(EnsembleError::LengthMismatch {
            posteriors: posteriors.len(),
            weights: w.len(),
        });
    }
    pool(posteriors, &w.weights)
}

/// Pool posteriors with uniform model weights 1/N.
pub fn flat_average(posteriors: &[ModelPosterior<'_>]) -> Result<WeightedPosterior, EnsembleError> {
    let n = posteriors.len();
    let uniform = vec![1.0 / n as f64; n];
    pool(posteriors, &uniform)
}
