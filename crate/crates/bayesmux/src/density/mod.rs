//! From validated model plus dataset to a normalized log-joint density over
//! an unconstrained real vector: data binding, parameter-space layout,
//! bijective constraint transforms with Jacobians, and per-distribution log
//! densities with truncation renormalization.

mod dataset;
mod dist;
mod logjoint;
mod space;

pub use dataset::{DataValue, Dataset, Num};
pub use dist::{log_density_dist, Trunc};
pub use logjoint::{midpoint_init, DensityOptions, LogDensityFn};
pub use space::{
    build_parameter_space, from_unconstrained, to_unconstrained, ParameterSpace, SpaceEntry,
};

use thiserror::Error;

/// The callable contract consumed by samplers and evidence estimators: a
/// fixed-dimension log density over unconstrained real vectors. Evaluation
/// must be pure (identical inputs give bit-identical outputs), return `-inf`
/// rather than erroring on domain violations, and never produce NaN.
pub trait LogDensity: Sync {
    fn dim(&self) -> usize;
    fn log_density(&self, y: &[f64]) -> f64;
}

impl LogDensity for LogDensityFn {
    fn dim(&self) -> usize {
        LogDensityFn::dim(self)
    }

    fn log_density(&self, y: &[f64]) -> f64 {
        self.log_joint(y)
    }
}

/// Errors raised while binding data or compiling a density. Runtime
/// evaluation never errors; it signals violations with `-inf`.
#[derive(Debug, Clone, Error)]
pub enum DensityError {
    #[error("E_MISSING_DATA: model declares `{name}` but the dataset does not bind it")]
    MissingData { name: String },
    #[error("E_EXTRA_DATA: dataset binds `{name}` but the model does not declare it")]
    ExtraData { name: String },
    #[error("E_SHAPE_MISMATCH: {message}")]
    ShapeMismatch { message: String },
    #[error("E_OUT_OF_DOMAIN: {message}")]
    OutOfDomain { message: String },
    #[error("E_UNSUPPORTED_TRUNCATION: {message}")]
    UnsupportedTruncation { message: String },
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
}
