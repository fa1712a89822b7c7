//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

/// Coarse grouping of errors, used by the command-line front end to pick an
/// exit code and a machine-readable category tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Io,
    Numerical,
    Fit,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Io => "io",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Fit => "fit",
        }
    }

    /// Process exit code associated with the category.
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorCategory::Config | ErrorCategory::Io => 2,
            ErrorCategory::Numerical => 3,
            ErrorCategory::Fit => 4,
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("tensor is not positive definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("deformation gradient is not invertible (det F = {det:e})")]
    NonInvertible { det: f64 },

    #[error("eigenvalue {index} is coalesced with another eigenvalue; its projection derivative is undefined")]
    CoalescedEigenvalue { index: usize },

    #[error("model expects {expected} structural tensor(s), got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("energy overflow: exponent argument {argument:e} from invariant {invariant} = {value:e}")]
    NonFiniteEnergy {
        invariant: &'static str,
        value: f64,
        argument: f64,
    },

    #[error("invalid material model: {0}")]
    InvalidModel(String),

    #[error("Voigt matrix violates the expected symmetry pattern at entry ({row},{col}): deviation {deviation:e}")]
    PatternViolation { row: usize, col: usize, deviation: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (last residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },

    #[error("stress ratio undefined: reference stress {sigma11:e} is below threshold")]
    DivisionDegenerate { sigma11: f64 },

    #[error("ill-conditioned estimate: {0}")]
    IllConditioned(String),

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dataset {label}: row {row}: {message}")]
    Validation {
        label: String,
        row: usize,
        message: String,
    },

    #[error("finite-difference verification failed: {0}")]
    Verification(String),

    #[error("optimizer made no progress: {0}")]
    NoProgress(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::InvalidModel(_) | Error::ArityMismatch { .. } => {
                ErrorCategory::Config
            }
            Error::Parse { .. } | Error::Validation { .. } => ErrorCategory::Config,
            Error::Io(_) | Error::Csv(_) => ErrorCategory::Io,
            Error::NoProgress(_) => ErrorCategory::Fit,
            _ => ErrorCategory::Numerical,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
