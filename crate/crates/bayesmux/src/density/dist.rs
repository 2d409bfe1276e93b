//! Fully normalized log densities with optional truncation renormalization.
//!
//! Constraining a parameter to a sub-interval of a distribution's support
//! silently un-normalizes the density unless the retained mass is divided
//! out. Here truncation subtracts `log(CDF(upper) - CDF(lower))` under the
//! distribution's own CDF. Runtime domain violations (bad arguments, values
//! outside support) evaluate to `-inf` rather than erroring, so a sampler
//! treats them as zero-probability states; the result is never NaN.

use super::DensityError;
use crate::dsl::Dist;
use statrs::distribution::{
    Beta, Continuous, ContinuousCDF, Exp, Gamma, Normal, StudentsT, Uniform,
};
use statrs::function::gamma::ln_gamma;

/// Truncation interval; `None` on a side means unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Trunc {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Trunc {
    /// Whether the interval actually cuts into `(nat_lo, nat_hi)`.
    fn is_effective(&self, nat_lo: f64, nat_hi: f64) -> bool {
        self.lower.map(|l| l > nat_lo).unwrap_or(false)
            || self.upper.map(|u| u < nat_hi).unwrap_or(false)
    }
}

/// Natural support of a distribution given its arguments.
fn natural_support(dist: Dist, args: &[f64]) -> (f64, f64) {
    match dist {
        Dist::Normal | Dist::StudentT => (f64::NEG_INFINITY, f64::INFINITY),
        Dist::Uniform => (args[0], args[1]),
        Dist::Beta => (0.0, 1.0),
        Dist::Gamma | Dist::Exponential => (0.0, f64::INFINITY),
        Dist::Bernoulli | Dist::Binomial => (0.0, 1.0), // unused for discrete
    }
}

/// Log density (pdf or pmf) of `dist(args)` at `value`, renormalized over the
/// truncation interval when one is given.
///
/// Errors only for truncation requests the implementation cannot normalize
/// (`student_t`, and the discrete distributions). Everything else maps domain
/// violations to `-inf`.
pub fn log_density_dist(
    dist: Dist,
    args: &[f64],
    value: f64,
    trunc: Option<Trunc>,
) -> Result<f64, DensityError> {
    assert_eq!(
        args.len(),
        dist.arity(),
        "argument count for {}",
        dist.name()
    );
    if args.iter().any(|a| a.is_nan()) || value.is_nan() {
        return Ok(f64::NEG_INFINITY);
    }

    if dist.is_discrete() {
        if let Some(t) = trunc {
            if t.lower.is_some() || t.upper.is_some() {
                return Err(DensityError::UnsupportedTruncation {
                    message: format!("truncation of `{}` is not supported", dist.name()),
                });
            }
        }
        return Ok(match dist {
            Dist::Bernoulli => bernoulli_ln_pmf(args[0], value),
            Dist::Binomial => binomial_ln_pmf(args[0], args[1], value),
            _ => unreachable!(),
        });
    }

    let (nat_lo, nat_hi) = natural_support(dist, args);
    let effective = trunc
        .map(|t| t.is_effective(nat_lo, nat_hi))
        .unwrap_or(false);

    if dist == Dist::StudentT && effective {
        return Err(DensityError::UnsupportedTruncation {
            message: "truncation of `student_t` is not supported".into(),
        });
    }

    // outside the truncation interval the density is zero
    if let Some(t) = trunc {
        if t.lower.map(|l| value < l).unwrap_or(false)
            || t.upper.map(|u| value > u).unwrap_or(false)
        {
            return Ok(f64::NEG_INFINITY);
        }
    }

    let base = continuous_ln_pdf(dist, args, value);
    if !effective || base == f64::NEG_INFINITY {
        return Ok(base);
    }

    let t = trunc.unwrap();
    let lo = t.lower.map(|l| l.max(nat_lo)).unwrap_or(nat_lo);
    let hi = t.upper.map(|u| u.min(nat_hi)).unwrap_or(nat_hi);
    let mass = cdf(dist, args, hi) - cdf(dist, args, lo);
    if !(mass > 0.0) || !mass.is_finite() {
        // no mass inside the interval: impossible statement
        return Ok(f64::NEG_INFINITY);
    }
    Ok(base - mass.ln())
}

fn continuous_ln_pdf(dist: Dist, args: &[f64], value: f64) -> f64 {
    match dist {
        Dist::Normal => match Normal::new(args[0], args[1]) {
            Ok(d) => d.ln_pdf(value),
            Err(_) => f64::NEG_INFINITY,
        },
        Dist::StudentT => {
            // argument order: (df, location, scale)
            match StudentsT::new(args[1], args[2], args[0]) {
                Ok(d) => d.ln_pdf(value),
                Err(_) => f64::NEG_INFINITY,
            }
        }
        Dist::Uniform => {
            if !(args[0] < args[1]) {
                return f64::NEG_INFINITY;
            }
            if value < args[0] || value > args[1] {
                f64::NEG_INFINITY
            } else {
                -(args[1] - args[0]).ln()
            }
        }
        Dist::Beta => {
            if value <= 0.0 || value >= 1.0 {
                return f64::NEG_INFINITY;
            }
            match Beta::new(args[0], args[1]) {
                Ok(d) => d.ln_pdf(value),
                Err(_) => f64::NEG_INFINITY,
            }
        }
        Dist::Gamma => {
            if value <= 0.0 {
                return f64::NEG_INFINITY;
            }
            match Gamma::new(args[0], args[1]) {
                Ok(d) => d.ln_pdf(value),
                Err(_) => f64::NEG_INFINITY,
            }
        }
        Dist::Exponential => {
            if value < 0.0 {
                return f64::NEG_INFINITY;
            }
            match Exp::new(args[0]) {
                Ok(d) => d.ln_pdf(value),
                Err(_) => f64::NEG_INFINITY,
            }
        }
        Dist::Bernoulli | Dist::Binomial => unreachable!("discrete handled separately"),
    }
}

fn cdf(dist: Dist, args: &[f64], x: f64) -> f64 {
    if x == f64::NEG_INFINITY {
        return 0.0;
    }
    if x == f64::INFINITY {
        return 1.0;
    }
    match dist {
        Dist::Normal => Normal::new(args[0], args[1])
            .map(|d| d.cdf(x))
            .unwrap_or(f64::NAN),
        Dist::Uniform => Uniform::new(args[0], args[1])
            .map(|d| d.cdf(x))
            .unwrap_or(f64::NAN),
        Dist::Beta => Beta::new(args[0], args[1])
            .map(|d| d.cdf(x))
            .unwrap_or(f64::NAN),
        Dist::Gamma => Gamma::new(args[0], args[1])
            .map(|d| d.cdf(x))
            .unwrap_or(f64::NAN),
        Dist::Exponential => Exp::new(args[0]).map(|d| d.cdf(x)).unwrap_or(f64::NAN),
        Dist::StudentT | Dist::Bernoulli | Dist::Binomial => f64::NAN,
    }
}

fn bernoulli_ln_pmf(p: f64, value: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) {
        return f64::NEG_INFINITY;
    }
    if value == 1.0 {
        p.ln()
    } else if value == 0.0 {
        (1.0 - p).ln()
    } else {
        f64::NEG_INFINITY
    }
}

fn binomial_ln_pmf(n: f64, p: f64, value: f64) -> f64 {
    if !(0.0..=1.0).contains(&p) || n < 0.0 || n.fract() != 0.0 || !n.is_finite() {
        return f64::NEG_INFINITY;
    }
    if value < 0.0 || value > n || value.fract() != 0.0 {
        return f64::NEG_INFINITY;
    }
    let (n_, k) = (n, value);
    let ln_choose = ln_gamma(n_ + 1.0) - ln_gamma(k + 1.0) - ln_gamma(n_ - k + 1.0);
    // guard the 0*log(0) corners at p = 0 or 1
    let succ = if k == 0.0 { 0.0 } else { k * p.ln() };
    let fail = if k == n_ {
        0.0
    } else {
        (n_ - k) * (1.0 - p).ln()
    };
    ln_choose + succ + fail
}
