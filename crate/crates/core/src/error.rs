use thiserror::Error;

/// Errors raised while building spaces or evaluating operators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operator `{label}` is not hermitian (max |A - A^dag| = {residual:.3e})")]
    NotHermitian { label: String, residual: f64 },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("sharpness k = {k} is below the minimum {min} for this truncation")]
    SharpnessTooSmall { k: f64, min: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument {value} outside the domain of {function}")]
    Domain { function: &'static str, value: f64 },

    #[error("interlacing needs sizes n and n+1, got inner {inner} and outer {outer}")]
    InterlacingSize { inner: usize, outer: usize },

    /// Per-`l` defects of the weight condition `sum_h |w_l^h|^2 = (2l+1)/(Lambda+1)^2`.
    #[error("fiducial weights violate the frame condition at l = {:?}", defects.iter().map(|d| d.0).collect::<Vec<_>>())]
    WeightCondition { defects: Vec<(usize, f64)> },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),
}

pub type Result<T> = std::result::Result<T, Error>;
