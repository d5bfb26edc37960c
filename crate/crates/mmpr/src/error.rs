use thiserror::Error;

use crate::data::Scale;

/// Errors produced by the mmpr library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A covariate column has zero norm after centering and cannot be scaled.
    #[error("covariate column {index} ({name:?}) is constant after centering")]
    ConstantColumn { index: usize, name: String },

    /// Two vectors that must have equal length do not.
    #[error("vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    /// Matrix/vector shapes are inconsistent with each other or with the config.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// A coefficient set was passed on the wrong scale.
    #[error("coefficients are on the {found:?} scale, expected {expected:?}")]
    ScaleMismatch { expected: Scale, found: Scale },

    /// A correlation matrix admits no Cholesky factorization.
    #[error("correlation matrix is not positive definite")]
    NotPositiveDefinite,

    /// A configuration value violates its domain.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Data contain non-finite or otherwise unusable values.
    #[error("invalid data: {0}")]
    InvalidData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
