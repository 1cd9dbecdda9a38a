use thiserror::Error;

use crate::sarima::FittedModel;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the toolkit.
///
/// Variants are grouped by origin: data problems (ingestion, degenerate
/// inputs) versus numerical problems (non-convergence, singular designs).
/// The CLI maps the former to exit code 1 and the latter to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("csv line {line}: {reason}")]
    Ingest { line: usize, reason: String },

    #[error("unsupported frequency {got}: this operation needs monthly data (frequency {expected})")]
    UnsupportedFrequency { got: usize, expected: usize },

    #[error("series too short: need at least {needed} observations, got {got}")]
    SeriesTooShort { needed: usize, got: usize },

    #[error("warmup length {got} does not match the difference spec (expected {expected})")]
    WarmupMismatch { expected: usize, got: usize },

    #[error("degenerate series: values are constant")]
    DegenerateSeries,

    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("collinear design: column(s) {} linearly dependent on the others", .0.join(", "))]
    Collinear(Vec<String>),

    #[error("invalid specification: {0}")]
    BadSpec(String),

    /// Optimizer exhausted its evaluation budget. Carries the best fit found
    /// so callers (the leaderboard in particular) can still report it.
    #[error("estimation did not converge within the evaluation budget")]
    EstimationFailed(Box<FittedModel>),

    #[error("no stationary-and-invertible parameter values exist for this specification")]
    InfeasibleSpec,

    #[error("degenerate fit: residual sum of squares is not positive")]
    DegenerateFit,

    #[error("candidate specifications difference the data differently; their criteria are not comparable")]
    IncomparableCandidates,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("horizon exceeds the representable period range")]
    HorizonOverflow,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}

impl Error {
    /// True for errors caused by user-supplied data or options rather than
    /// by numerical failure. Drives the CLI exit-code contract.
    pub fn is_user_error(&self) -> bool {
        match self {
            Error::Ingest { .. }
            | Error::UnsupportedFrequency { .. }
            | Error::SeriesTooShort { .. }
            | Error::WarmupMismatch { .. }
            | Error::BadSpec(_)
            | Error::IncomparableCandidates
            | Error::InvalidConfig(_)
            | Error::HorizonOverflow
            | Error::LengthMismatch { .. } => true,
            Error::DegenerateSeries
            | Error::NumericalDegeneracy(_)
            | Error::Collinear(_)
            | Error::EstimationFailed(_)
            | Error::InfeasibleSpec
            | Error::DegenerateFit => false,
        }
    }
}
