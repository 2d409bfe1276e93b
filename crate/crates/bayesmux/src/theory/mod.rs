//! Exact, enumeration-based checks of the evidence-weighting scheme on small
//! finite model spaces: posterior model weights, optimal variational weights
//! and the joint divergence they achieve, the self-normalized importance
//! sampling variance law, and the slack-perturbed generalization.

mod ops;
mod report;
mod variance;

pub use ops::{
    exact_model_posterior, inexact_divergence, inexact_divergence_elbo_form, joint_divergence,
    joint_divergence_elbo, joint_divergence_of, log_marginal_over_models, optimal_model_weights,
    optimal_model_weights_elbo, relaxed_bound,
};
pub use report::{full_report, InexactSection, TheoryReport, TheorySimConfig};
pub use variance::{simulate_snis, snis_asymptotic_variance, SimResult, VarianceReport};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A fully enumerated model space: prior, exact log evidences, per-model
/// KL divergences of the within-model approximations, per-model conditional
/// expectations of the query, and optional per-model bound slack.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiniteModelSpace {
    pub prior: Vec<f64>,
    pub log_evidence: Vec<f64>,
    pub kl: Vec<f64>,
    pub g: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack: Option<Vec<f64>>,
}

impl FiniteModelSpace {
    pub fn len(&self) -> usize {
        self.prior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prior.is_empty()
    }

    pub fn validate(&self) -> Result<(), TheoryError> {
        let m = self.prior.len();
        if m == 0 {
            return Err(TheoryError::InvalidSpace("empty model space".into()));
        }
        for (name, v) in [
            ("log_evidence", &self.log_evidence),
            ("kl", &self.kl),
            ("g", &self.g),
        ] {
            if v.len() != m {
                return Err(TheoryError::InvalidSpace(format!(
                    "`{name}` has {} entries, expected {m}",
                    v.len()
                )));
            }
        }
        if let Some(s) = &self.slack {
            if s.len() != m {
                return Err(TheoryError::InvalidSpace(format!(
                    "`slack` has {} entries, expected {m}",
                    s.len()
                )));
            }
            if s.iter().any(|&d| d < 0.0) {
                return Err(TheoryError::InvalidSpace(
                    "slack must be nonnegative".into(),
                ));
            }
        }
        if self.prior.iter().any(|&p| p < 0.0) {
            return Err(TheoryError::InvalidSpace(
                "prior must be nonnegative".into(),
            ));
        }
        let total: f64 = self.prior.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(TheoryError::InvalidSpace(format!(
                "prior sums to {total}, expected 1"
            )));
        }
        if self.kl.iter().any(|&k| k < 0.0) {
            return Err(TheoryError::InvalidSpace("kl must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn from_json_str(text: &str) -> Result<Self, TheoryError> {
        let s: FiniteModelSpace =
            serde_json::from_str(text).map_err(|e| TheoryError::ParseSpace(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Error)]
pub enum TheoryError {
    #[error("E_DEGENERATE: all posterior mass annihilates")]
    Degenerate,
    #[error("E_ZERO_PRIOR_SUPPORT: posterior mass on a model with zero prior probability")]
    ZeroPriorSupport,
    #[error("invalid model space: {0}")]
    InvalidSpace(String),
    #[error("E_PARSE_SPACE: {0}")]
    ParseSpace(String),
}
