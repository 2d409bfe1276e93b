//! Monte-Carlo lower bounds on the log marginal likelihood.
//!
//! The importance-weighted bound averages R independent repetitions of
//! `logsumexp_k(log p(y_k) - log q(y_k)) - log K` with K proposal draws each;
//! K = 1 recovers the plain ELBO estimator. Everything stays in log space. A
//! `-inf` log joint poisons only its own term inside the logsumexp; a
//! repetition whose every draw is impossible makes the whole bound `-inf`
//! (reported, not an error). Repetitions are independently seeded from
//! (seed, repetition index), so the result is identical whether they run
//! sequentially or in parallel; the final mean uses fixed-shape pairwise
//! summation for bit reproducibility.

use super::proposal::GaussianProposal;
use crate::density::LogDensity;
use crate::seed;
use crate::stats::{log_sum_exp, mean, sample_variance};
use rayon::prelude::*;

/// Configuration of the importance-weighted bound.
#[derive(Debug, Clone, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct EvidenceConfig {
    /// Inner samples per repetition.
    pub k: usize,
    /// Outer repetitions.
    pub r: usize,
    pub seed: u64,
}

impl Default for EvidenceConfig {
    fn default() -> Self {
        EvidenceConfig {
            k: 25,
            r: 10_000,
            seed: 0,
        }
    }
}

/// A lower bound on log p(x|m) with its Monte-Carlo standard error.
#[derive(Debug, Clone, serde::Serialize)]
pub struct EvidenceEstimate {
    /// Bound value in nats.
    pub value: f64,
    /// Standard error of the outer average; infinite when any repetition
    /// came out `-inf`.
    pub std_error: f64,
    pub k: usize,
    pub r: usize,
}

fn summarize(terms: Vec<f64>, k: usize, r: usize) -> EvidenceEstimate {
    if terms.iter().any(|t| *t == f64::NEG_INFINITY) {
        return EvidenceEstimate {
            value: f64::NEG_INFINITY,
            std_error: f64::INFINITY,
            k,
            r,
        };
    }
    let value = mean(&terms);
    let std_error = if terms.len() > 1 {
        (sample_variance(&terms) / terms.len() as f64).sqrt()
    } else {
        f64::INFINITY
    };
    EvidenceEstimate {
        value,
        std_error,
        k,
        r,
    }
}

/// Importance-weighted lower bound with `cfg.k` inner samples and `cfg.r`
/// outer repetitions.
pub fn iw_elbo<L: LogDensity + ?Sized>(
    f: &L,
    q: &GaussianProposal,
    cfg: &EvidenceConfig,
) -> EvidenceEstimate {
    assert!(cfg.k >= 1 && cfg.r >= 1, "K and R must be at least 1");
    let log_k = (cfg.k as f64).ln();
    let terms: Vec<f64> = (0..cfg.r)
        .into_par_iter()
        .map(|rep| {
            let mut rng = seed::stream(cfg.seed, &["iw-rep".into(), (rep as u64).into()]);
            let mut ratios = Vec::with_capacity(cfg.k);
            for _ in 0..cfg.k {
                let y = q.sample(&mut rng);
                ratios.push(f.log_density(&y) - q.log_density(&y));
            }
            log_sum_exp(&ratios) - log_k
        })
        .collect();
    summarize(terms, cfg.k, cfg.r)
}

/// Plain ELBO estimator: the Monte-Carlo mean of `log p(y) - log q(y)` over
/// `samples` proposal draws.
pub fn elbo<L: LogDensity + ?Sized>(
    f: &L,
    q: &GaussianProposal,
    samples: usize,
    seed_value: u64,
) -> EvidenceEstimate {
    assert!(
        samples >= 2,
        "need at least two samples for a standard error"
    );
    let mut rng = seed::stream(seed_value, &["elbo".into()]);
    let terms: Vec<f64> = (0..samples)
        .map(|_| {
            let y = q.sample(&mut rng);
            f.log_density(&y) - q.log_density(&y)
        })
        .collect();
    summarize(terms, 1, samples)
}

/// The per-repetition terms of the bound, exposed for estimator diagnostics.
pub fn iw_elbo_terms<L: LogDensity + ?Sized>(
    f: &L,
    q: &GaussianProposal,
    cfg: &EvidenceConfig,
) -> Vec<f64> {
    let log_k = (cfg.k as f64).ln();
    (0..cfg.r)
        .map(|rep| {
            let mut rng = seed::stream(cfg.seed, &["iw-rep".into(), (rep as u64).into()]);
            let ratios: Vec<f64> = (0..cfg.k)
                .map(|_| {
                    let y = q.sample(&mut rng);
                    f.log_density(&y) - q.log_density(&y)
                })
                .collect();
            log_sum_exp(&ratios) - log_k
        })
        .collect()
}
