use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid spacing {spacing}: {reason}")]
    InvalidSpacing { spacing: f64, reason: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("space cannot be refined: {0}")]
    NotRefinable(String),
    #[error("system has no inverse rule: {0}")]
    MissingInverse(String),
    #[error("conjugacy maps do not round-trip at {point:?} (error {error:e})")]
    ConjugacyRoundTrip { point: Vec<f64>, error: f64 },
    #[error("subset is not invariant: point {point:?} leaves it at step {step}")]
    NotInvariant { point: Vec<f64>, step: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("operation not applicable: {0}")]
    NotApplicable(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
