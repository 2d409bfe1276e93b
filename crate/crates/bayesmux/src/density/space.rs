//! Parameter-space layout and the constraint transforms.
//!
//! Each parameter occupies a contiguous run of coordinates in declaration
//! order. Bounded coordinates are mapped bijectively to the real line so
//! samplers and proposals can work on all of R^dim:
//!
//! - no bounds: identity
//! - lower only: y = log(x - lower)
//! - upper only: y = log(upper - x)
//! - both:       y = logit((x - lower) / (upper - lower))
//!
//! `from_unconstrained` also returns log|det dv/dy|, the change-of-variables
//! correction added to the log joint.

use super::dataset::{DataValue, Dataset, Num};
use super::DensityError;
use crate::dsl::{ArrayLen, NumKind, ParsedModel};
use crate::stats::log_sigmoid;

/// Layout entry for one declared parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceEntry {
    pub name: String,
    pub offset: usize,
    pub len: usize,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

/// Ordered layout of all parameters of one model against one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ParameterSpace {
    pub entries: Vec<SpaceEntry>,
    pub dim: usize,
}

impl ParameterSpace {
    /// Coordinate names in layout order, arrays expanded as `name[i]` (1-based).
    pub fn coordinate_names(&self) -> Vec<String> {
        let mut out = Vec::with_capacity(self.dim);
        for e in &self.entries {
            if e.len == 1 {
                out.push(e.name.clone());
            } else {
                for i in 1..=e.len {
                    out.push(format!("{}[{i}]", e.name));
                }
            }
        }
        out
    }

    fn bounds_at(&self, coord: usize) -> (Option<f64>, Option<f64>) {
        for e in &self.entries {
            if coord >= e.offset && coord < e.offset + e.len {
                return (e.lower, e.upper);
            }
        }
        unreachable!("coordinate {coord} outside layout");
    }
}

/// Resolve an array length against the dataset.
pub(crate) fn resolve_len(len: &ArrayLen, data: &Dataset) -> Result<usize, DensityError> {
    match len {
        ArrayLen::Literal(n) => Ok(*n as usize),
        ArrayLen::Name(name) => {
            let v = data
                .int_scalar(name)
                .ok_or_else(|| DensityError::ShapeMismatch {
                    message: format!(
                        "array length `{name}` is not an integer scalar in the dataset"
                    ),
                })?;
            if v < 1 {
                return Err(DensityError::ShapeMismatch {
                    message: format!("array length `{name}` must be at least 1, got {v}"),
                });
            }
            Ok(v as usize)
        }
    }
}

/// Check the dataset against the model's data declarations and lay out the
/// parameter vector. Every declaration must be bound with matching shape and
/// domain; bindings with no declaration are an error.
pub fn build_parameter_space(
    model: &ParsedModel,
    data: &Dataset,
) -> Result<ParameterSpace, DensityError> {
    for name in data.names() {
        if model.data_decl(name).is_none() {
            return Err(DensityError::ExtraData {
                name: name.to_string(),
            });
        }
    }
    for d in &model.data_decls {
        let value = data.get(&d.name).ok_or_else(|| DensityError::MissingData {
            name: d.name.clone(),
        })?;
        match (&d.len, value) {
            (None, DataValue::Scalar(n)) => check_domain(&d.name, d.kind, d.zero_one, *n)?,
            (Some(len), DataValue::Array(items)) => {
                let want = resolve_len(len, data)?;
                if items.len() != want {
                    return Err(DensityError::ShapeMismatch {
                        message: format!(
                            "`{}` has {} elements but its declared length is {want}",
                            d.name,
                            items.len()
                        ),
                    });
                }
                for n in items {
                    check_domain(&d.name, d.kind, d.zero_one, *n)?;
                }
            }
            (None, DataValue::Array(_)) => {
                return Err(DensityError::ShapeMismatch {
                    message: format!("`{}` is declared scalar but bound to an array", d.name),
                })
            }
            (Some(_), DataValue::Scalar(_)) => {
                return Err(DensityError::ShapeMismatch {
                    message: format!("`{}` is declared as an array but bound to a scalar", d.name),
                })
            }
        }
    }

    let mut entries = Vec::with_capacity(model.params.len());
    let mut offset = 0;
    for p in &model.params {
        let len = match &p.len {
            None => 1,
            Some(l) => resolve_len(l, data)?,
        };
        entries.push(SpaceEntry {
            name: p.name.clone(),
            offset,
            len,
            lower: p.lower,
            upper: p.upper,
        });
        offset += len;
    }
    Ok(ParameterSpace {
        entries,
        dim: offset,
    })
}

fn check_domain(name: &str, kind: NumKind, zero_one: bool, n: Num) -> Result<(), DensityError> {
    match kind {
        NumKind::Int => {
            let v = n.as_int().ok_or_else(|| DensityError::ShapeMismatch {
                message: format!("`{name}` is integer data but holds a non-integer value"),
            })?;
            if zero_one && !(v == 0 || v == 1) {
                return Err(DensityError::ShapeMismatch {
                    message: format!("`{name}` is restricted to {{0,1}} but holds {v}"),
                });
            }
        }
        NumKind::Real => {
            if !n.as_f64().is_finite() {
                return Err(DensityError::ShapeMismatch {
                    message: format!("`{name}` holds a non-finite value"),
                });
            }
        }
    }
    Ok(())
}

/// Map a constrained vector to the unconstrained space. The input must lie
/// strictly inside its bounds.
pub fn to_unconstrained(space: &ParameterSpace, v: &[f64]) -> Result<Vec<f64>, DensityError> {
    if v.len() != space.dim {
        return Err(DensityError::ShapeMismatch {
            message: format!("expected {} coordinates, got {}", space.dim, v.len()),
        });
    }
    let mut y = Vec::with_capacity(space.dim);
    for (i, &x) in v.iter().enumerate() {
        let (lower, upper) = space.bounds_at(i);
        let mapped = match (lower, upper) {
            (None, None) => x,
            (Some(l), None) => {
                if x <= l {
                    return Err(out_of_domain(space, i, x));
                }
                (x - l).ln()
            }
            (None, Some(u)) => {
                if x >= u {
                    return Err(out_of_domain(space, i, x));
                }
                (u - x).ln()
            }
            (Some(l), Some(u)) => {
                if x <= l || x >= u {
                    return Err(out_of_domain(space, i, x));
                }
                let t = (x - l) / (u - l);
                (t / (1.0 - t)).ln()
            }
        };
        y.push(mapped);
    }
    Ok(y)
}

fn out_of_domain(space: &ParameterSpace, coord: usize, x: f64) -> DensityError {
    DensityError::OutOfDomain {
        message: format!(
            "coordinate `{}` value {x} violates its bounds",
            space.coordinate_names()[coord]
        ),
    }
}

/// Inverse of [`to_unconstrained`], plus the log-Jacobian of the inverse map.
/// Defined on all of R^dim.
pub fn from_unconstrained(space: &ParameterSpace, y: &[f64]) -> (Vec<f64>, f64) {
    debug_assert_eq!(y.len(), space.dim);
    let mut v = Vec::with_capacity(space.dim);
    let mut log_jac = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let (lower, upper) = space.bounds_at(i);
        match (lower, upper) {
            (None, None) => v.push(yi),
            (Some(l), None) => {
                v.push(l + yi.exp());
                log_jac += yi;
            }
            (None, Some(u)) => {
                v.push(u - yi.exp());
                log_jac += yi;
            }
            (Some(l), Some(u)) => {
                let w = u - l;
                let s = 1.0 / (1.0 + (-yi).exp());
                v.push(l + w * s);
                log_jac += w.ln() + log_sigmoid(yi) + log_sigmoid(-yi);
            }
        }
    }
    (v, log_jac)
}
