use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation. `field` names the offending input.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: String, reason: String },

    /// Optical supermode frequencies are not ordered `omega_b > omega_a`.
    #[error("mode ordering violated: omega_b ({omega_b:e} rad/s) must exceed omega_a ({omega_a:e} rad/s)")]
    ModeOrdering { omega_a: f64, omega_b: f64 },

    /// Input lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The caller asked for something the operation does not support.
    #[error("usage error: {0}")]
    Usage(String),

    /// Field grids passed to an overlap integral do not share a layout.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("steady-state solver did not converge after {iterations} iterations (residual {residual:e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    /// Malformed input file. `location` is a line number, a field path, or both.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for the error class.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter { .. } => "invalid-parameter",
            Error::ModeOrdering { .. } => "mode-ordering",
            Error::Domain(_) => "domain",
            Error::Usage(_) => "usage",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::SolverDiverged { .. } => "solver",
            Error::Parse { .. } => "parse",
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
