//! Posterior weights, optimal variational weights, and joint divergences,
//! all evaluated in log space with max subtraction.

use super::{FiniteModelSpace, TheoryError};
use crate::stats::log_sum_exp;

fn softmax_log(scores: &[f64]) -> Result<Vec<f64>, TheoryError> {
    let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(TheoryError::Degenerate);
    }
    let raw: Vec<f64> = scores.iter().map(|&s| (s - m).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.iter().map(|r| r / total).collect())
}

/// Unnormalized posterior log scores: log prior + log evidence.
fn posterior_scores(s: &FiniteModelSpace) -> Vec<f64> {
    s.prior
        .iter()
        .zip(s.log_evidence.iter())
        .map(|(&p, &le)| p.ln() + le)
        .collect()
}

/// log p(x|t): the log marginal over the whole model space.
pub fn log_marginal_over_models(s: &FiniteModelSpace) -> f64 {
    log_sum_exp(&posterior_scores(s))
}

/// Posterior model weights: prior times marginal likelihood, normalized.
pub fn exact_model_posterior(s: &FiniteModelSpace) -> Result<Vec<f64>, TheoryError> {
    s.validate()?;
    softmax_log(&posterior_scores(s))
}

/// The joint-divergence-optimal model weights: posterior weights damped by
/// each model's approximation quality, prior * evidence * exp(-KL).
pub fn optimal_model_weights(s: &FiniteModelSpace) -> Result<Vec<f64>, TheoryError> {
    s.validate()?;
    let scores: Vec<f64> = posterior_scores(s)
        .iter()
        .zip(s.kl.iter())
        .map(|(&ps, &kl)| ps - kl)
        .collect();
    softmax_log(&scores)
}

/// Same weights expressed through bound values: prior * exp(elbo). With
/// elbo = log_evidence - kl the two forms agree identically.
pub fn optimal_model_weights_elbo(prior: &[f64], elbo: &[f64]) -> Result<Vec<f64>, TheoryError> {
    assert_eq!(prior.len(), elbo.len());
    let scores: Vec<f64> = prior
        .iter()
        .zip(elbo.iter())
        .map(|(&p, &e)| p.ln() + e)
        .collect();
    softmax_log(&scores)
}

/// Joint divergence achieved by the optimal weights:
/// -log E_{posterior}[exp(-KL)].
pub fn joint_divergence(s: &FiniteModelSpace) -> Result<f64, TheoryError> {
    s.validate()?;
    let scores = posterior_scores(s);
    let log_px = log_sum_exp(&scores);
    if log_px == f64::NEG_INFINITY {
        return Err(TheoryError::Degenerate);
    }
    let damped: Vec<f64> = scores
        .iter()
        .zip(s.kl.iter())
        .map(|(&ps, &kl)| ps - log_px - kl)
        .collect();
    Ok(-log_sum_exp(&damped))
}

/// Joint divergence in bound form: log p(x|t) - log E_{prior}[exp(elbo)].
pub fn joint_divergence_elbo(prior: &[f64], elbo: &[f64], log_px_t: f64) -> f64 {
    assert_eq!(prior.len(), elbo.len());
    let scores: Vec<f64> = prior
        .iter()
        .zip(elbo.iter())
        .map(|(&p, &e)| p.ln() + e)
        .collect();
    log_px_t - log_sum_exp(&scores)
}

/// Joint divergence of an arbitrary weight vector `q` over the same space:
/// KL(q || posterior) + E_q[KL_m]. The optimal weights minimize this.
pub fn joint_divergence_of(s: &FiniteModelSpace, q: &[f64]) -> Result<f64, TheoryError> {
    s.validate()?;
    assert_eq!(q.len(), s.len());
    let post = exact_model_posterior(s)?;
    let mut acc = 0.0;
    for i in 0..q.len() {
        if q[i] == 0.0 {
            continue;
        }
        if post[i] == 0.0 {
            return Ok(f64::INFINITY);
        }
        acc += q[i] * ((q[i] / post[i]).ln() + s.kl[i]);
    }
    Ok(acc)
}

/// Jensen relaxation of the joint divergence: E_{posterior}[KL_m].
pub fn relaxed_bound(s: &FiniteModelSpace) -> Result<f64, TheoryError> {
    let post = exact_model_posterior(s)?;
    Ok(post.iter().zip(s.kl.iter()).map(|(&p, &k)| p * k).sum())
}

/// Joint divergence when weights are computed from slack-perturbed bounds:
/// -log E_{posterior}[exp(-KL - slack + mean slack)], where the mean is
/// taken under the perturbed weights themselves.
pub fn inexact_divergence(s: &FiniteModelSpace) -> Result<f64, TheoryError> {
    s.validate()?;
    let slack = s
        .slack
        .as_ref()
        .ok_or_else(|| TheoryError::InvalidSpace("slack vector required".into()))?;
    let scores = posterior_scores(s);
    let log_px = log_sum_exp(&scores);
    if log_px == f64::NEG_INFINITY {
        return Err(TheoryError::Degenerate);
    }
    // q(m|x) ∝ prior * exp(elbo - slack), elbo = log_evidence - kl
    let q_scores: Vec<f64> = (0..s.len())
        .map(|i| s.prior[i].ln() + s.log_evidence[i] - s.kl[i] - slack[i])
        .collect();
    let q = softmax_log(&q_scores)?;
    let mean_slack: f64 = q.iter().zip(slack.iter()).map(|(&qi, &d)| qi * d).sum();
    let damped: Vec<f64> = (0..s.len())
        .map(|i| scores[i] - log_px - s.kl[i] - slack[i] + mean_slack)
        .collect();
    Ok(-log_sum_exp(&damped))
}

/// The bound-form expression of [`inexact_divergence`]; the two agree to
/// floating-point accuracy and are cross-checked in tests.
pub fn inexact_divergence_elbo_form(s: &FiniteModelSpace) -> Result<f64, TheoryError> {
    s.validate()?;
    let slack = s
        .slack
        .as_ref()
        .ok_or_else(|| TheoryError::InvalidSpace("slack vector required".into()))?;
    let log_px = log_marginal_over_models(s);
    let q_scores: Vec<f64> = (0..s.len())
        .map(|i| s.prior[i].ln() + s.log_evidence[i] - s.kl[i] - slack[i])
        .collect();
    let q = softmax_log(&q_scores)?;
    let mean_slack: f64 = q.iter().zip(slack.iter()).map(|(&qi, &d)| qi * d).sum();
    let scores: Vec<f64> = (0..s.len())
        .map(|i| s.prior[i].ln() + (s.log_evidence[i] - s.kl[i]) - slack[i] + mean_slack)
        .collect();
    Ok(log_px - log_sum_exp(&scores))
}
