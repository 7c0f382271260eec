use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error in `{param}`: {reason}")]
    Domain { param: &'static str, reason: String },

    /// A size parameter exceeds what the operation is willing to allocate.
    #[error("resource cap exceeded: {what} = {value} > {cap}")]
    Resource { what: &'static str, value: usize, cap: usize },

    /// Two routes that must agree did not.
    #[error("numeric consistency failure: {0}")]
    NumericConsistency(String),

    #[error("solver failure: {reason} (residual {residual:e})")]
    Solver { reason: String, residual: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain { param, reason: reason.into() }
    }

    pub(crate) fn check_cap(what: &'static str, value: usize, cap: usize) -> Result<()> {
        if value > cap {
            Err(Error::Resource { what, value, cap })
        } else {
            Ok(())
        }
    }
}
