//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by problem assembly, schedules, and the solver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vectors must have at least one coordinate")]
    EmptyVector,

    #[error("non-finite value encountered: {context}")]
    NonFinite { context: &'static str },

    #[error("a feasibility problem needs at least one constraint")]
    NoConstraints,

    #[error("constraint coordinate {coordinate} out of range for dimension {dimension}")]
    CoordinateOutOfRange { coordinate: usize, dimension: usize },

    #[error("pointwise max needs at least one child")]
    EmptyMax,

    #[error("invalid step size {value}: {reason}")]
    InvalidStepSize { value: f64, reason: &'static str },

    #[error("harmonic schedule offset must be positive, got {0}")]
    InvalidScheduleOffset(f64),

    #[error("explicit schedule exhausted at step {step} and no tail rule was declared")]
    ScheduleExhausted { step: u64 },

    #[error("no violated constraint at the current point; the iteration should have stopped")]
    NoViolatedConstraint,

    #[error("certificate field {field} must be positive, got {value}")]
    CertificateNotPositive { field: &'static str, value: f64 },

    #[error("row {index} is not strictly separated: <z, a_{index}> = {margin}")]
    NotASeparator { index: usize, margin: f64 },

    #[error("dataset row {index} is zero")]
    ZeroRow { index: usize },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
