//! Evidence-weighted model averaging: self-normalized weights from per-model
//! log-evidence bounds, pooled posteriors over shared goals, the uniform
//! baseline, and weighted summaries.

mod combine;
mod summary;
mod weights;

pub use combine::{combine, flat_average, ModelGoalDraws, ModelPosterior, WeightedPosterior};
pub use summary::{weighted_summary, SummaryStats};
pub use weights::{snis_weights, weight_ess, WeightVector};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EnsembleError {
    #[error("E_ALL_NEG_INF: every log score is -inf; no model can carry weight")]
    AllNegInf,
    #[error("E_GOAL_SHAPE_MISMATCH: {message}")]
    GoalShapeMismatch { message: String },
    #[error("{posteriors} posteriors but {weights} weights")]
    LengthMismatch { posteriors: usize, weights: usize },
}
