//! Self-normalized weights over candidate models.

use super::EnsembleError;

/// Normalized model weights together with the raw log scores they came from.
#[derive(Debug, Clone)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub log_scores: Vec<f64>,
}

impl WeightVector {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// softmax of the log scores, computed with max subtraction so adding a
/// common constant to every score cannot change the result. A `-inf` score
/// gets weight zero; all scores `-inf` is an error.
pub fn snis_weights(log_scores: &[f64]) -> Result<WeightVector, EnsembleError> {
    assert!(!log_scores.is_empty(), "no scores to weigh");
    let m = log_scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Err(EnsembleError::AllNegInf);
    }
    let raw: Vec<f64> = log_scores.iter().map(|&l| (l - m).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(WeightVector {
        weights: raw.iter().map(|r| r / total).collect(),
        log_scores: log_scores.to_vec(),
    })
}

/// Effective number of models carrying the ensemble: 1 / sum(w^2).
pub fn weight_ess(w: &WeightVector) -> f64 {
    let s: f64 = w.weights.iter().map(|v| v * v).sum();
    1.0 / s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_scores_give_uniform_weights() {
        for c in [-1000.0, 0.0, 3.5, 999.0] {
            let w = snis_weights(&[c, c, c]).unwrap();
            for v in &w.weights {
                assert!((v - 1.0 / 3.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn log_ratio_recovered() {
        let w = snis_weights(&[2f64.ln(), 0.0]).unwrap();
        assert!((w.weights[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.weights[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn extreme_spread_is_stable() {
        let w = snis_weights(&[0.0, -1000.0]).unwrap();
        assert!(w.weights[0] > 1.0 - 1e-12);
        assert!(w.weights[1] < 1e-12);
        assert!(w.weights.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn neg_inf_scores_get_zero_weight() {
        let w = snis_weights(&[0.5, f64::NEG_INFINITY, 0.5]).unwrap();
        assert_eq!(w.weights[1], 0.0);
        assert!((w.weights[0] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn all_neg_inf_is_an_error() {
        assert!(matches!(
            snis_weights(&[f64::NEG_INFINITY, f64::NEG_INFINITY]),
            Err(EnsembleError::AllNegInf)
        ));
    }

    #[test]
    fn shift_invariance_exact_on_representable_shifts() {
        // score differences survive these shifts exactly in binary floating
        // point, so the softmax must be bit-identical
        let base = [0.25, -1.5, 3.75, 0.0];
        for c in [-64.0, 2.0, 1024.0] {
            let shifted: Vec<f64> = base.iter().map(|l| l + c).collect();
            let a = snis_weights(&base).unwrap();
            let b = snis_weights(&shifted).unwrap();
            for (x, y) in a.weights.iter().zip(b.weights.iter()) {
                assert_eq!(x.to_bits(), y.to_bits(), "shift {c}");
            }
        }
    }

    #[test]
    fn shift_invariance_approximate_for_arbitrary_shifts() {
        let base = [0.3, -2.7, 1.9];
        let a = snis_weights(&base).unwrap();
        for c in [13.7, -401.001, 3.3e5] {
            let shifted: Vec<f64> = base.iter().map(|l| l + c).collect();
            let b = snis_weights(&shifted).unwrap();
            for (x, y) in a.weights.iter().zip(b.weights.iter()) {
                assert!((x - y).abs() < 1e-9, "shift {c}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn snis_matches_exact_posterior_under_uniform_prior() {
        // weighting sampled models by their evidence is the same computation
        // as the exact posterior over an enumerated space with uniform prior
        use crate::theory::{exact_model_posterior, FiniteModelSpace};
        let scores = [
            -13.609666503728126,
            -13.390483353630013,
            -13.602089604780624,
        ];
        let w = snis_weights(&scores).unwrap();
        let s = FiniteModelSpace {
            prior: vec![1.0 / 3.0; 3],
            log_evidence: scores.to_vec(),
            kl: vec![0.0; 3],
            g: vec![0.0; 3],
            slack: None,
        };
        let post = exact_model_posterior(&s).unwrap();
        for (a, b) in w.weights.iter().zip(post.iter()) {
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn weight_ess_reference_points() {
        let uniform = WeightVector {
            weights: vec![0.1; 10],
            log_scores: vec![0.0; 10],
        };
        assert!((weight_ess(&uniform) - 10.0).abs() < 1e-12);
        let one_hot = WeightVector {
            weights: vec![1.0, 0.0, 0.0],
            log_scores: vec![0.0, -1e9, -1e9],
        };
        assert!((weight_ess(&one_hot) - 1.0).abs() < 1e-12);
        let half = WeightVector {
            weights: vec![0.5, 0.5, 0.0],
            log_scores: vec![0.0, 0.0, -1e9],
        };
        assert!((weight_ess(&half) - 2.0).abs() < 1e-12);
    }
}
