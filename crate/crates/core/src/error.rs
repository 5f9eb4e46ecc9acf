use thiserror::Error;

/// Errors raised by the model, fitting and I/O layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The model was evaluated outside the domain where it is physical
    /// (for example `epsilon * xi >= 1` in the temperature law).
    #[error("model domain violation: {0}")]
    Domain(String),

    /// The fixed-step integrator was asked for a step that no longer
    /// advances time in floating point.
    #[error("integration step underflow at t = {t}")]
    StepUnderflow { t: f64 },

    /// An iterative fit ran out of iterations.
    #[error("fit did not converge after {iterations} iterations (rss = {rss})")]
    NonConvergence { iterations: usize, rss: f64 },

    /// The normal equations of a fit could not be solved or a fitted
    /// quantity came out unphysical.
    #[error("degenerate fit: {0}")]
    Degenerate(String),

    /// Malformed tabular or configuration input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::InvalidInput(msg()))
    }
}
