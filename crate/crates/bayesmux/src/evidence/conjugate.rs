//! Exact log marginal likelihoods for the conjugate families used as test
//! oracles throughout the suite.

use statrs::distribution::{Continuous, Normal};
use statrs::function::beta::ln_beta;
use statrs::function::gamma::ln_gamma;

/// The closed-form families.
#[derive(Debug, Clone)]
pub enum ConjugateFamily {
    /// Beta(alpha, beta) prior over a Bernoulli rate, observed as a sequence
    /// of successes and failures.
    BetaBernoulli {
        alpha: f64,
        beta: f64,
        successes: u64,
        failures: u64,
    },
    /// Beta prior over a Binomial(n, p) count observation.
    BetaBinomial {
        alpha: f64,
        beta: f64,
        trials: u64,
        successes: u64,
    },
    /// Normal prior over the mean of a normal likelihood with known variance.
    NormalNormalKnownVar {
        prior_mean: f64,
        prior_var: f64,
        obs_var: f64,
        observations: Vec<f64>,
    },
}

/// Exact log marginal likelihood of the family.
pub fn conjugate_evidence(family: &ConjugateFamily) -> f64 {
    match family {
        ConjugateFamily::BetaBernoulli {
            alpha,
            beta,
            successes,
            failures,
        } => ln_beta(alpha + *successes as f64, beta + *failures as f64) - ln_beta(*alpha, *beta),
        ConjugateFamily::BetaBinomial {
            alpha,
            beta,
            trials,
            successes,
        } => {
            let n = *trials as f64;
            let k = *successes as f64;
            let ln_choose = ln_gamma(n + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n - k + 1.0);
            ln_choose + ln_beta(alpha + k, beta + (n - k)) - ln_beta(*alpha, *beta)
        }
        ConjugateFamily::NormalNormalKnownVar {
            prior_mean,
            prior_var,
            obs_var,
            observations,
        } => {
            // chain of one-step-ahead predictives, each one a normal
            let mut m = *prior_mean;
            let mut v = *prior_var;
            let mut log_ev = 0.0;
            for &x in observations {
                let pred = Normal::new(m, (v + obs_var).sqrt()).expect("positive variance");
                log_ev += pred.ln_pdf(x);
                let precision = 1.0 / v + 1.0 / obs_var;
                let v_new = 1.0 / precision;
                m = v_new * (m / v + x / obs_var);
                v = v_new;
            }
            log_ev
        }
    }
}
