//! Posterior sampling via adaptive random-walk Metropolis, plus convergence
//! diagnostics. The sampler is gradient-free and works against anything
//! implementing [`crate::density::LogDensity`].

mod diagnostics;
mod sampler;

pub use diagnostics::{diagnostics, Diagnostics};
pub use sampler::{run_chain, sample_posterior, ChainRun};

use crate::density::ParameterSpace;
use thiserror::Error;

/// Sampler configuration.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct McmcConfig {
    pub chains: usize,
    /// Retained iterations per chain, after warmup.
    pub iterations: usize,
    pub warmup: usize,
    pub target_accept: f64,
    pub seed: u64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            chains: 2,
            iterations: 10_000,
            warmup: 5_000,
            target_accept: 0.30,
            seed: 0,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self) -> Result<(), McmcError> {
        if self.chains < 1 {
            return Err(McmcError::BadConfig("chains must be at least 1".into()));
        }
        if self.iterations < 100 {
            return Err(McmcError::BadConfig(
                "iterations must be at least 100".into(),
            ));
        }
        if self.warmup < 100 {
            return Err(McmcError::BadConfig("warmup must be at least 100".into()));
        }
        if !(self.target_accept > 0.0 && self.target_accept < 1.0) {
            return Err(McmcError::BadConfig(
                "target_accept must lie strictly inside (0,1)".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Error)]
pub enum McmcError {
    #[error("E_INIT_INVALID: the log density is -inf at the initial point")]
    InitInvalid,
    #[error("E_CANNOT_INITIALIZE: no valid initialization found after 100 jitter attempts")]
    CannotInitialize,
    #[error("invalid sampler configuration: {0}")]
    BadConfig(String),
}

/// Posterior draws for one model, in both coordinate systems.
#[derive(Debug, Clone)]
pub struct PosteriorSamples {
    /// `[chain][iteration][coordinate]`, unconstrained space.
    pub draws: Vec<Vec<Vec<f64>>>,
    /// Same layout, constrained space; every draw satisfies its bounds.
    pub constrained_draws: Vec<Vec<Vec<f64>>>,
    /// Post-warmup acceptance rate per chain.
    pub accept_rate: Vec<f64>,
    pub space: ParameterSpace,
}

impl PosteriorSamples {
    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn total_draws(&self) -> usize {
        self.draws.iter().map(|c| c.len()).sum()
    }

    /// All unconstrained draws, chains concatenated in order.
    pub fn flat_unconstrained(&self) -> impl Iterator<Item = &[f64]> {
        self.draws
            .iter()
            .flat_map(|c| c.iter().map(|d| d.as_slice()))
    }

    /// All constrained draws, chains concatenated in order.
    pub fn flat_constrained(&self) -> impl Iterator<Item = &[f64]> {
        self.constrained_draws
            .iter()
            .flat_map(|c| c.iter().map(|d| d.as_slice()))
    }
}
