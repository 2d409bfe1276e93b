//! Ensemble Bayesian inference over generated probabilistic models.
//!
//! The pipeline: candidate models written in a small probabilistic-model DSL
//! are proposed (from a text corpus or a chat-completion endpoint), filtered
//! through parsing and validation, fitted with adaptive-Metropolis MCMC, and
//! scored with an importance-weighted evidence lower bound. Per-model bounds
//! become self-normalized weights, and the weighted mixture of per-model
//! posteriors over the shared goal variables is the final answer, reported
//! next to a uniform-weight baseline.
//!
//! Module map:
//! - [`dsl`]: the model language (parse, validate, pretty-print, block extraction)
//! - [`density`]: datasets, constraint transforms, and the log-joint density
//! - [`mcmc`]: adaptive random-walk Metropolis with convergence diagnostics
//! - [`evidence`]: moment-matched Gaussian proposals and ELBO / IW-ELBO bounds
//! - [`ensemble`]: evidence weights, posterior pooling, weighted summaries
//! - [`proposer`]: corpus and HTTP model proposers plus the rejection filter
//! - [`theory`]: exact finite-model-space checks of the weighting scheme
//! - [`pipeline`]: end-to-end orchestration and report emission

pub mod density;
pub mod dsl;
pub mod ensemble;
pub mod evidence;
pub mod mcmc;
pub mod pipeline;
pub mod proposer;
pub mod theory;

pub(crate) mod linalg;
pub mod seed;
pub mod stats;
