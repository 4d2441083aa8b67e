use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("frequency {frequency} exceeds the cutoff {cutoff}")]
    FrequencyOutOfRange { frequency: i64, cutoff: i64 },

    #[error("truncation K = {cutoff} is too small: at least {required} is required")]
    TruncationTooSmall { cutoff: i64, required: i64 },

    #[error("spectrum carries a tail of {tail:e} without decay metadata; the differentiated tail cannot be certified")]
    UncertifiedTail { tail: f64 },

    #[error("insufficient decay: exponent {exponent} does not allow order {order}")]
    InsufficientDecay { exponent: f64, order: u32 },

    #[error("custom kernel `{0}` has no decay envelope, its tail cannot be certified")]
    MissingDecay(String),

    #[error("weight polynomial vanishes at ik for k = {0}")]
    WeightPole(i64),

    #[error("degenerate basis: element {label} has D = {d_norm:e}, the shifts are linearly dependent")]
    DegenerateBasis { label: String, d_norm: f64 },

    #[error("power iteration did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("Gram matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("sample {index} does not belong to class {class}")]
    SampleOutsideClass { index: usize, class: String },

    #[error("the space does not contain constants, so the ratio over class {0} is unbounded")]
    UnboundedRatio(String),

    #[error("boundary condition violated: {0}")]
    BoundaryViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
