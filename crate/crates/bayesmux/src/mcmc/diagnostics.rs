//! Convergence diagnostics: split R-hat and autocorrelation-based effective
//! sample size, computed per unconstrained coordinate.

use super::PosteriorSamples;

/// Per-coordinate convergence summary. `passed` requires every split R-hat
/// below 1.05 and every ESS above 100.
#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub split_rhat: Vec<f64>,
    pub ess: Vec<f64>,
    pub passed: bool,
}

pub fn diagnostics(s: &PosteriorSamples) -> Diagnostics {
    let dim = s.space.dim;
    let mut split_rhat = Vec::with_capacity(dim);
    let mut ess = Vec::with_capacity(dim);
    for coord in 0..dim {
        let chains: Vec<Vec<f64>> = s
            .draws
            .iter()
            .map(|chain| chain.iter().map(|d| d[coord]).collect())
            .collect();
        let halves = split_chains(&chains);
        split_rhat.push(rhat_of(&halves));
        ess.push(ess_of(&halves));
    }
    let passed = split_rhat.iter().all(|&r| r < 1.05) && ess.iter().all(|&e| e > 100.0);
    Diagnostics {
        split_rhat,
        ess,
        passed,
    }
}

fn split_chains(chains: &[Vec<f64>]) -> Vec<&[f64]> {
    let mut halves = Vec::with_capacity(chains.len() * 2);
    for c in chains {
        let mid = c.len() / 2;
        halves.push(&c[..mid]);
        halves.push(&c[mid..mid * 2]);
    }
    halves
}

fn chain_mean(c: &[f64]) -> f64 {
    c.iter().sum::<f64>() / c.len() as f64
}

/// Between/within variance decomposition over (already split) chains.
fn variance_components(halves: &[&[f64]]) -> (f64, f64, f64) {
    let m = halves.len() as f64;
    let n = halves[0].len() as f64;
    let means: Vec<f64> = halves.iter().map(|c| chain_mean(c)).collect();
    let grand = means.iter().sum::<f64>() / m;
    let b = if halves.len() > 1 {
        means.iter().map(|&cm| (cm - grand).powi(2)).sum::<f64>() * n / (m - 1.0)
    } else {
        0.0
    };
    let w = halves
        .iter()
        .zip(means.iter())
        .map(|(c, &cm)| c.iter().map(|&x| (x - cm).powi(2)).sum::<f64>() / (n - 1.0))
        .sum::<f64>()
        / m;
    let var_plus = (n - 1.0) / n * w + b / n;
    (b, w, var_plus)
}

fn rhat_of(halves: &[&[f64]]) -> f64 {
    let (_, w, var_plus) = variance_components(halves);
    if var_plus < 1e-300 {
        return 1.0; // all chains constant and equal
    }
    if w < 1e-300 {
        return f64::INFINITY; // constant chains that disagree
    }
    (var_plus / w).sqrt()
}

/// ESS from the initial positive sequence of paired autocorrelations
/// (summation stops at the first strictly negative pair sum). Antithetic
/// chains legitimately report more effective samples than raw draws.
fn ess_of(halves: &[&[f64]]) -> f64 {
    let m = halves.len();
    let n = halves[0].len();
    let total = (m * n) as f64;
    let (_, _, var_plus) = variance_components(halves);
    if var_plus < 1e-300 {
        return total;
    }

    let means: Vec<f64> = halves.iter().map(|c| chain_mean(c)).collect();
    let mean_acov = |t: usize| -> f64 {
        halves
            .iter()
            .zip(means.iter())
            .map(|(c, &cm)| {
                let mut acc = 0.0;
                for i in 0..n - t {
                    acc += (c[i] - cm) * (c[i + t] - cm);
                }
                acc / (n - 1) as f64
            })
            .sum::<f64>()
            / m as f64
    };

    let w = mean_acov(0) * (n - 1) as f64 / (n - 1) as f64; // lag-0 autocovariance
    let rho = |t: usize| 1.0 - (w - mean_acov(t)) / var_plus;

    // tau = 2 * sum_k (rho_{2k} + rho_{2k+1}) - 1, truncated at the first
    // negative pair sum
    let mut pair_sum_total = 0.0;
    let mut k = 0;
    loop {
        let t0 = 2 * k;
        let t1 = 2 * k + 1;
        if t1 >= n {
            break;
        }
        let gamma = rho(t0) + rho(t1);
        if gamma < 0.0 {
            break;
        }
        pair_sum_total += gamma;
        k += 1;
    }
    let tau = (2.0 * pair_sum_total - 1.0).max(1.0 / total);
    total / tau
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::ParameterSpace;

    fn samples_from(chains: Vec<Vec<f64>>) -> PosteriorSamples {
        let space = ParameterSpace {
            entries: vec![crate::density::SpaceEntry {
                name: "x".into(),
                offset: 0,
                len: 1,
                lower: None,
                upper: None,
            }],
            dim: 1,
        };
        let draws: Vec<Vec<Vec<f64>>> = chains
            .into_iter()
            .map(|c| c.into_iter().map(|v| vec![v]).collect())
            .collect();
        PosteriorSamples {
            constrained_draws: draws.clone(),
            draws,
            accept_rate: vec![0.3],
            space,
        }
    }

    fn pseudo_normal(seed: u64, n: usize) -> Vec<f64> {
        // deterministic light-weight generator for fixture chains
        use rand::Rng;
        let mut rng = crate::seed::stream(seed, &["diag-fixture".into()]);
        (0..n)
            .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
            .collect()
    }

    #[test]
    fn identical_distribution_chains_have_unit_rhat() {
        let a = pseudo_normal(1, 2000);
        let b = pseudo_normal(2, 2000);
        let d = diagnostics(&samples_from(vec![a, b]));
        assert!(
            (d.split_rhat[0] - 1.0).abs() < 0.01,
            "rhat {}",
            d.split_rhat[0]
        );
        assert!(d.passed);
    }

    #[test]
    fn disagreeing_chains_fail() {
        // a chain stuck away from the bulk of the other
        let a = vec![2.0; 500];
        let b = pseudo_normal(3, 500);
        let d = diagnostics(&samples_from(vec![a, b]));
        assert!(d.split_rhat[0] > 1.05, "rhat {}", d.split_rhat[0]);
        assert!(!d.passed);
    }

    #[test]
    fn antithetic_chain_ess_exceeds_draw_count_without_nan() {
        let c: Vec<f64> = (0..1000)
            .map(|i| if i % 2 == 0 { 1.0 } else { -1.0 })
            .collect();
        let d = diagnostics(&samples_from(vec![c]));
        assert!(d.ess[0].is_finite());
        assert!(!d.ess[0].is_nan());
        assert!(d.ess[0] > 1000.0, "antithetic ess {}", d.ess[0]);
    }

    #[test]
    fn iid_chain_ess_near_total() {
        let a = pseudo_normal(4, 4000);
        let b = pseudo_normal(5, 4000);
        let d = diagnostics(&samples_from(vec![a, b]));
        assert!(d.ess[0] > 4000.0, "iid ess {}", d.ess[0]);
    }

    #[test]
    fn sticky_chain_ess_small() {
        // strongly autocorrelated random walk
        let mut x = 0.0;
        let noise = pseudo_normal(6, 4000);
        let c: Vec<f64> = noise
            .iter()
            .map(|e| {
                x += 0.05 * e;
                x
            })
            .collect();
        let d = diagnostics(&samples_from(vec![c]));
        assert!(d.ess[0] < 500.0, "random walk ess {}", d.ess[0]);
    }

    #[test]
    fn constant_chains_do_not_blow_up() {
        let d = diagnostics(&samples_from(vec![vec![2.0; 400], vec![2.0; 400]]));
        assert_eq!(d.split_rhat[0], 1.0);
        assert_eq!(d.ess[0], 800.0);
    }
}
