use std::path::PathBuf;

use crate::model::Trajectory;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Evaluation outside the mathematical domain of a constitutive law,
    /// e.g. the effective-velocity potential at vacuum with alpha <= 1.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested diagnostic is only defined in the alpha = gamma regime.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// A time step produced a negative density. The step is rejected;
    /// retry with a smaller dt.
    #[error("step failure at t = {time}: {reason} (retry with a smaller dt)")]
    StepFailure { time: f64, reason: String },

    /// Non-finite values appeared in the fields.
    #[error("numerical failure at t = {time}: {reason}")]
    Numerical { time: f64, reason: String },

    /// The step budget ran out before t_end. Carries everything recorded
    /// up to that point.
    #[error("step budget exceeded: {max_steps} steps reached at t = {time}")]
    BudgetExceeded {
        max_steps: u64,
        time: f64,
        partial: Box<Trajectory>,
    },

    /// Two inputs that must share a grid or snapshot times do not.
    #[error("mismatch: {0}")]
    Mismatch(String),

    /// The reference trajectory fails the strong-solution monitors.
    #[error("reference not strong: {0}")]
    NotStrong(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
