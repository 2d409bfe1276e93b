//! The asymptotic variance of the self-normalized importance sampling
//! estimator over model space, its chi-squared bound, and a Monte-Carlo
//! replication harness to verify both empirically.

use super::ops::exact_model_posterior;
use super::{FiniteModelSpace, TheoryError};
use crate::seed;
use crate::stats::{mean, sample_variance};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

/// Asymptotic variance report. `v_n` is N times the variance of the
/// N-sample estimator in the large-N limit; `bound` is the chi-squared bound
/// when a payoff half-width `delta` is supplied.
#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    /// Posterior mean of the payoff.
    pub mu: f64,
    /// lim N * Var of the estimator.
    pub v_n: f64,
    /// Chi-squared divergence of the posterior weights from the prior.
    pub chi2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub empirical: Option<f64>,
}

/// Exact asymptotic SNIS variance on an enumerated space:
/// v_n = E_prior[(posterior/prior)^2 (g - mu)^2], chi2 = sum post^2/prior - 1.
pub fn snis_asymptotic_variance(
    s: &FiniteModelSpace,
    delta: Option<f64>,
) -> Result<VarianceReport, TheoryError> {
    let post = exact_model_posterior(s)?;
    for i in 0..s.len() {
        if post[i] > 0.0 && s.prior[i] == 0.0 {
            return Err(TheoryError::ZeroPriorSupport);
        }
    }
    let mu: f64 = post.iter().zip(s.g.iter()).map(|(&p, &g)| p * g).sum();
    let mut v_n = 0.0;
    let mut chi2 = -1.0;
    for i in 0..s.len() {
        if s.prior[i] == 0.0 {
            continue;
        }
        let ratio = post[i] / s.prior[i];
        v_n += s.prior[i] * ratio * ratio * (s.g[i] - mu) * (s.g[i] - mu);
        chi2 += post[i] * post[i] / s.prior[i];
    }
    let bound = delta.map(|d| d * d * (1.0 + chi2));
    Ok(VarianceReport {
        mu,
        v_n,
        chi2,
        bound,
        empirical: None,
    })
}

/// Monte-Carlo mean and variance of the SNIS estimator across replications.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub mean: f64,
    pub variance: f64,
    pub n: usize,
    pub replications: usize,
}

/// Simulate the estimator: each replication draws `n` models iid from the
/// prior, weights them by softmax of their log evidences, and reports the
/// weighted payoff. Replications are independently seeded and may run in
/// parallel without changing the result.
pub fn simulate_snis(
    s: &FiniteModelSpace,
    n: usize,
    replications: usize,
    seed_value: u64,
) -> Result<SimResult, TheoryError> {
    s.validate()?;
    assert!(n >= 1 && replications >= 2);
    let m = s.len();
    let mut cdf = Vec::with_capacity(m);
    let mut acc = 0.0;
    for &p in &s.prior {
        acc += p;
        cdf.push(acc);
    }

    let estimates: Vec<f64> = (0..replications)
        .into_par_iter()
        .map(|rep| {
            let mut rng = seed::stream(seed_value, &["snis-rep".into(), (rep as u64).into()]);
            let mut drawn_scores = Vec::with_capacity(n);
            let mut drawn_g = Vec::with_capacity(n);
            for _ in 0..n {
                let u: f64 = rng.random();
                let idx = cdf.iter().position(|&c| u <= c).unwrap_or(m - 1);
                drawn_scores.push(s.log_evidence[idx]);
                drawn_g.push(s.g[idx]);
            }
            let mx = drawn_scores
                .iter()
                .copied()
                .fold(f64::NEG_INFINITY, f64::max);
            let raw: Vec<f64> = drawn_scores.iter().map(|&l| (l - mx).exp()).collect();
            let total: f64 = raw.iter().sum();
            raw.iter()
                .zip(drawn_g.iter())
                .map(|(&w, &g)| w / total * g)
                .sum()
        })
        .collect();

    Ok(SimResult {
        mean: mean(&estimates),
        variance: sample_variance(&estimates),
        n,
        replications,
    })
}
