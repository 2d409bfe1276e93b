//! Small numeric helpers shared across modules: log-space reductions,
//! deterministic summation, and moment/quantile computations.

/// log(sum(exp(xs))) with max subtraction. `-inf` terms drop out; an all
/// `-inf` (or empty) input yields `-inf`. Never returns NaN for non-NaN input.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        // all -inf, or empty
        return f64::NEG_INFINITY;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Pairwise (fixed tree shape) summation. The reduction order depends only on
/// the slice length, so totals are bit-reproducible no matter how the terms
/// were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

/// Mean via pairwise summation.
pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance (divisor n-1) via pairwise summation.
pub fn sample_variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    assert!(n >= 2, "sample_variance needs at least two values");
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|&x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (n - 1) as f64
}

/// log(1 + exp(x)) without overflow.
pub fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// log(sigmoid(x)) = -softplus(-x).
pub fn log_sigmoid(x: f64) -> f64 {
    -softplus(-x)
}

/// Weighted quantile with the lower-step convention: the smallest value whose
/// cumulative weight reaches `p`. Weights must be nonnegative; they are
/// normalized internally.
pub fn weighted_quantile(values_weights: &mut [(f64, f64)], p: f64) -> f64 {
    assert!(!values_weights.is_empty());
    assert!((0.0..=1.0).contains(&p));
    values_weights.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("NaN value in quantile input"));
    let total: f64 = values_weights.iter().map(|vw| vw.1).sum();
    let mut acc = 0.0;
    for &(v, w) in values_weights.iter() {
        acc += w / total;
        if acc >= p {
            return v;
        }
    }
    values_weights.last().unwrap().0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_sum_exp_matches_naive_in_safe_range() {
        let xs = [0.3, -1.2, 2.0];
        let naive: f64 = xs.iter().map(|x: &f64| x.exp()).sum::<f64>().ln();
        assert!((log_sum_exp(&xs) - naive).abs() < 1e-12);
    }

    #[test]
    fn log_sum_exp_handles_extreme_spread() {
        // spread of 1400 nats would overflow exp() without max subtraction
        let v = log_sum_exp(&[700.0, -700.0]);
        assert!((v - 700.0).abs() < 1e-12);
        assert!(log_sum_exp(&[-800.0, -800.0]).is_finite());
    }

    #[test]
    fn log_sum_exp_neg_inf_terms() {
        let v = log_sum_exp(&[f64::NEG_INFINITY, 0.0]);
        assert!((v - 0.0).abs() < 1e-15);
        assert_eq!(
            log_sum_exp(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            f64::NEG_INFINITY
        );
    }

    #[test]
    fn pairwise_sum_is_exact_on_integers() {
        let xs: Vec<f64> = (1..=1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 500500.0);
    }

    #[test]
    fn weighted_quantile_lower_step() {
        let mut vw = vec![(1.0, 1.0), (2.0, 1.0), (3.0, 1.0)];
        assert_eq!(weighted_quantile(&mut vw, 0.5), 2.0);
        let mut vw = vec![(0.0, 0.9), (1.0, 0.05), (2.0, 0.05)];
        assert_eq!(weighted_quantile(&mut vw, 0.5), 0.0);
        assert_eq!(weighted_quantile(&mut vw, 0.95), 1.0);
    }
}
