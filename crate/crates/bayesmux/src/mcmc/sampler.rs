//! Adaptive random-walk Metropolis in unconstrained space.
//!
//! Proposals are N(y, s^2 * Sigma), where Sigma is the running empirical
//! covariance of the chain history (regularized with 1e-6 * I) and the scalar
//! step size s is driven toward the target acceptance rate by Robbins-Monro
//! updates. All adaptation happens during warmup and is frozen afterwards, so
//! the retained draws come from a fixed Markov kernel. Each chain owns an RNG
//! stream derived from (seed, chain index); a full run is a pure function of
//! its configuration.

use super::{McmcConfig, McmcError, PosteriorSamples};
use crate::density::{from_unconstrained, midpoint_init, LogDensity, LogDensityFn};
use crate::linalg;
use crate::seed;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

/// Post-warmup output of a single chain.
#[derive(Debug, Clone)]
pub struct ChainRun {
    pub draws: Vec<Vec<f64>>,
    pub accept_rate: f64,
}

/// Running mean and scatter for the proposal covariance (Welford updates).
struct RunningCov {
    n: usize,
    mean: Vec<f64>,
    m2: Vec<f64>, // dim x dim scatter matrix
    dim: usize,
}

impl RunningCov {
    fn new(dim: usize) -> Self {
        RunningCov {
            n: 0,
            mean: vec![0.0; dim],
            m2: vec![0.0; dim * dim],
            dim,
        }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1;
        let n = self.n as f64;
        let dim = self.dim;
        let mut delta = vec![0.0; dim];
        for i in 0..dim {
            delta[i] = x[i] - self.mean[i];
            self.mean[i] += delta[i] / n;
        }
        for i in 0..dim {
            let post = x[i] - self.mean[i];
            for j in 0..dim {
                self.m2[i * dim + j] += delta[j] * post;
            }
        }
    }

    /// Unbiased covariance with a small ridge.
    fn covariance(&self, ridge: f64) -> Option<Vec<f64>> {
        if self.n < 2 {
            return None;
        }
        let dim = self.dim;
        let mut cov = vec![0.0; dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                cov[i * dim + j] = self.m2[i * dim + j] / (self.n - 1) as f64;
            }
        }
        for i in 0..dim {
            cov[i * dim + i] += ridge;
        }
        Some(cov)
    }
}

/// Run one chain from `init`. Reproducible: the draw matrix is a pure
/// function of (target, init, cfg.seed, chain_index).
pub fn run_chain<L: LogDensity + ?Sized>(
    target: &L,
    init: &[f64],
    cfg: &McmcConfig,
    chain_index: usize,
) -> Result<ChainRun, McmcError> {
    cfg.validate()?;
    let dim = target.dim();
    assert_eq!(init.len(), dim, "init vector length");

    let mut lp = target.log_density(init);
    if lp == f64::NEG_INFINITY || lp.is_nan() {
        return Err(McmcError::InitInvalid);
    }

    let mut rng = seed::stream(cfg.seed, &["chain".into(), (chain_index as u64).into()]);
    let mut y = init.to_vec();

    let mut log_s = (2.38 / (dim as f64).sqrt()).ln();
    let mut cov_est = RunningCov::new(dim);
    cov_est.push(&y);

    // identity proposal until the history supports a covariance estimate
    let cov_warm_start = 20.max(2 * dim);
    let ridge = 1e-6;
    let mut chol: Option<Vec<f64>> = None;

    let total = cfg.warmup + cfg.iterations;
    let mut draws = Vec::with_capacity(cfg.iterations);
    let mut accepted_post = 0usize;

    let mut eps = vec![0.0; dim];
    for t in 0..total {
        let warming = t < cfg.warmup;
        for e in eps.iter_mut() {
            *e = rng.sample::<f64, _>(StandardNormal);
        }
        let s = log_s.exp();
        let proposal: Vec<f64> = match &chol {
            Some(l) => {
                let step = linalg::mul_lower(l, dim, &eps);
                y.iter()
                    .zip(step.iter())
                    .map(|(yi, st)| yi + s * st)
                    .collect()
            }
            None => y.iter().zip(eps.iter()).map(|(yi, e)| yi + s * e).collect(),
        };
        let lp_new = target.log_density(&proposal);
        let log_alpha = (lp_new - lp).min(0.0);
        let alpha = if lp_new == f64::NEG_INFINITY {
            0.0
        } else {
            log_alpha.exp()
        };
        let u: f64 = rng.random();
        if u < alpha {
            y = proposal;
            lp = lp_new;
            if !warming {
                accepted_post += 1;
            }
        }

        if warming {
            // Robbins-Monro on the log step size toward the target rate
            let gamma = ((t + 1) as f64).powf(-0.6);
            log_s += gamma * (alpha - cfg.target_accept);
            log_s = log_s.clamp(-12.0, 12.0);

            cov_est.push(&y);
            if cov_est.n >= cov_warm_start {
                if let Some(cov) = cov_est.covariance(ridge) {
                    // a failed factorization keeps the previous proposal shape
                    if let Some(l) = linalg::cholesky(&cov, dim) {
                        chol = Some(l);
                    }
                }
            }
        } else {
            draws.push(y.clone());
        }
    }

    Ok(ChainRun {
        draws,
        accept_rate: accepted_post as f64 / cfg.iterations as f64,
    })
}

/// Draw posterior samples for one compiled model: jittered midpoint
/// initializations, `cfg.chains` chains in parallel, constrained draws filled
/// in via the inverse transform.
pub fn sample_posterior(f: &LogDensityFn, cfg: &McmcConfig) -> Result<PosteriorSamples, McmcError> {
    cfg.validate()?;
    let dim = f.dim();
    let space = f.space().clone();

    // per-chain jittered inits; a model whose density is impossible
    // everywhere near the midpoint cannot be initialized
    let mut inits = Vec::with_capacity(cfg.chains);
    for chain in 0..cfg.chains {
        let mut rng = seed::stream(cfg.seed, &["init".into(), (chain as u64).into()]);
        let base = midpoint_init(&space);
        let mut found = None;
        for _ in 0..100 {
            let cand: Vec<f64> = base
                .iter()
                .map(|b| b + rng.random_range(-0.5..0.5))
                .collect();
            let lp = f.log_joint(&cand);
            if lp > f64::NEG_INFINITY {
                found = Some(cand);
                break;
            }
        }
        match found {
            Some(init) => inits.push(init),
            None => return Err(McmcError::CannotInitialize),
        }
    }

    let runs: Vec<Result<ChainRun, McmcError>> = inits
        .par_iter()
        .enumerate()
        .map(|(chain, init)| run_chain(f, init, cfg, chain))
        .collect();

    let mut draws = Vec::with_capacity(cfg.chains);
    let mut accept_rate = Vec::with_capacity(cfg.chains);
    for r in runs {
        let r = r?;
        draws.push(r.draws);
        accept_rate.push(r.accept_rate);
    }

    let constrained_draws: Vec<Vec<Vec<f64>>> = draws
        .iter()
        .map(|chain| {
            chain
                .iter()
                .map(|y| from_unconstrained(&space, y).0)
                .collect()
        })
        .collect();

    let _ = dim;
    Ok(PosteriorSamples {
        draws,
        constrained_draws,
        accept_rate,
        space,
    })
}
