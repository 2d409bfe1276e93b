//! Moment-matched Gaussian proposals.
//!
//! The proposal for a model is the Gaussian matching the empirical mean and
//! (unbiased) covariance of its MCMC draws in unconstrained space, which has
//! full support no matter the parameter constraints. Nearly singular
//! covariances get an escalating diagonal jitter before giving up.

use super::EvidenceError;
use crate::linalg;
use crate::mcmc::PosteriorSamples;
use rand::Rng;
use rand_distr::StandardNormal;

/// A full-covariance Gaussian with a precomputed Cholesky factor.
#[derive(Debug, Clone)]
pub struct GaussianProposal {
    pub mean: Vec<f64>,
    /// Row-major dim x dim, including any jitter that was applied.
    pub covariance: Vec<f64>,
    /// Lower-triangular factor of `covariance`.
    pub chol: Vec<f64>,
    dim: usize,
}

impl GaussianProposal {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Build directly from moments (jitter policy included).
    pub fn from_moments(mean: Vec<f64>, covariance: Vec<f64>) -> Result<Self, EvidenceError> {
        let dim = mean.len();
        assert_eq!(covariance.len(), dim * dim);

        if let Some(chol) = linalg::cholesky(&covariance, dim) {
            return Ok(GaussianProposal {
                mean,
                covariance,
                chol,
                dim,
            });
        }

        // escalating diagonal jitter, scaled by the mean diagonal entry
        let mut scale = (0..dim).map(|i| covariance[i * dim + i]).sum::<f64>() / dim as f64;
        if !(scale > 0.0) || !scale.is_finite() {
            scale = 1.0;
        }
        let mut mult = 1e-8;
        while mult <= 1e-2 {
            let mut jittered = covariance.clone();
            for i in 0..dim {
                jittered[i * dim + i] += mult * scale;
            }
            if let Some(chol) = linalg::cholesky(&jittered, dim) {
                return Ok(GaussianProposal {
                    mean,
                    covariance: jittered,
                    chol,
                    dim,
                });
            }
            mult *= 10.0;
        }
        Err(EvidenceError::Degenerate(
            "covariance is not positive definite even after jitter escalation".into(),
        ))
    }

    /// Log density at `y`.
    pub fn log_density(&self, y: &[f64]) -> f64 {
        debug_assert_eq!(y.len(), self.dim);
        let diff: Vec<f64> = y.iter().zip(self.mean.iter()).map(|(a, b)| a - b).collect();
        let z = linalg::solve_lower(&self.chol, self.dim, &diff);
        let quad: f64 = z.iter().map(|v| v * v).sum();
        let log_det_half: f64 = (0..self.dim)
            .map(|i| self.chol[i * self.dim + i].ln())
            .sum();
        -0.5 * self.dim as f64 * (2.0 * std::f64::consts::PI).ln() - log_det_half - 0.5 * quad
    }

    /// Draw one sample.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<f64> {
        let eps: Vec<f64> = (0..self.dim)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect();
        let step = linalg::mul_lower(&self.chol, self.dim, &eps);
        self.mean
            .iter()
            .zip(step.iter())
            .map(|(m, s)| m + s)
            .collect()
    }
}

/// Fit a Gaussian to raw draw vectors (rows). Uses the unbiased covariance
/// (divisor S-1).
pub fn moment_match_draws(draws: &[&[f64]], dim: usize) -> Result<GaussianProposal, EvidenceError> {
    let s = draws.len();
    if s < dim + 2 {
        return Err(EvidenceError::Degenerate(format!(
            "need at least dim+2 = {} draws, got {s}",
            dim + 2
        )));
    }
    let mut mean = vec![0.0; dim];
    for d in draws {
        for i in 0..dim {
            mean[i] += d[i];
        }
    }
    for m in mean.iter_mut() {
        *m /= s as f64;
    }
    let mut cov = vec![0.0; dim * dim];
    for d in draws {
        for i in 0..dim {
            let di = d[i] - mean[i];
            for j in 0..=i {
                cov[i * dim + j] += di * (d[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in 0..=i {
            let v = cov[i * dim + j] / (s - 1) as f64;
            cov[i * dim + j] = v;
            cov[j * dim + i] = v;
        }
    }
    GaussianProposal::from_moments(mean, cov)
}

/// Fit a Gaussian to the unconstrained MCMC draws of a model.
pub fn moment_match(samples: &PosteriorSamples) -> Result<GaussianProposal, EvidenceError> {
    let rows: Vec<&[f64]> = samples.flat_unconstrained().collect();
    moment_match_draws(&rows, samples.dim())
}
