//! Dense symmetric linear algebra for small dimensions (model parameter
//! spaces here are tens of coordinates at most). Row-major `Vec<f64>`
//! matrices; everything is plain loops so results are bit-deterministic.

/// Lower-triangular Cholesky factor of a symmetric positive-definite matrix.
/// Returns `None` if a pivot is not strictly positive.
pub fn cholesky(a: &[f64], dim: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), dim * dim);
    let mut l = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut s = a[i * dim + j];
            for k in 0..j {
                s -= l[i * dim + k] * l[j * dim + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * dim + i] = s.sqrt();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    Some(l)
}

/// Solve L x = b for lower-triangular L (forward substitution).
pub fn solve_lower(l: &[f64], dim: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..dim {
        for k in 0..i {
            let t = l[i * dim + k] * x[k];
            x[i] -= t;
        }
        x[i] /= l[i * dim + i];
    }
    x
}

/// y = L v for lower-triangular L.
pub fn mul_lower(l: &[f64], dim: usize, v: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; dim];
    for i in 0..dim {
        let mut s = 0.0;
        for k in 0..=i {
            s += l[i * dim + k] * v[k];
        }
        y[i] = s;
    }
    y
}
