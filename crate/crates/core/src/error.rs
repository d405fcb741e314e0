use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed input: wrong shape, out-of-range parameter, bad lattice point.
    #[error("validation error: {0}")]
    Validation(String),

    /// The requested problem would exceed the configured site cap.
    #[error("resource limit: K = {requested} exceeds the site cap {cap} (set CPB_MAX_SITES to override)")]
    Resource { requested: usize, cap: usize },

    /// Qubit frame cannot be built: mixing angle undefined.
    #[error("degenerate frame: {0}")]
    DegenerateFrame(String),

    /// Arithmetic identity broken beyond rounding (e.g. negative variance).
    #[error("numerical consistency: {0}")]
    Numerical(String),

    /// Non-finite value produced during time stepping.
    #[error("integration failed at step {step}: {reason}")]
    Integration { step: usize, reason: String },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
