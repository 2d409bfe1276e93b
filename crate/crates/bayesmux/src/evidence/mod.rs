//! Evidence bounds: moment-matched Gaussian proposals over the unconstrained
//! space, the plain and importance-weighted ELBO estimators, and closed-form
//! conjugate oracles for testing.

mod bounds;
mod conjugate;
mod proposal;

pub use bounds::{elbo, iw_elbo, iw_elbo_terms, EvidenceConfig, EvidenceEstimate};
pub use conjugate::{conjugate_evidence, ConjugateFamily};
pub use proposal::{moment_match, moment_match_draws, GaussianProposal};

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum EvidenceError {
    #[error("E_DEGENERATE: {0}")]
    Degenerate(String),
}
