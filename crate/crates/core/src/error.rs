use thiserror::Error;

/// Errors raised by the enclosure engine and its supporting modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A derivative or function value does not exist at the requested point.
    #[error("domain error: {function}: {message}")]
    Domain { function: String, message: String },

    /// An operation was called outside the hypotheses it relies on.
    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("point {x} lies outside the trust region [{lo}, {hi}]")]
    OutOfRegion { x: f64, lo: f64, hi: f64 },

    /// The upper coefficient of the quadratic majorizer is infinite.
    #[error("vacuous majorizer on [{lo}, {hi}]")]
    VacuousMajorizer { lo: f64, hi: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(function: &str, message: impl Into<String>) -> Self {
        Error::Domain {
            function: function.to_string(),
            message: message.into(),
        }
    }

    /// The message without its category prefix.
    pub fn detail(&self) -> String {
        match self {
            Error::InvalidArgument(m) | Error::Precondition(m) | Error::Parse(m) | Error::Io(m) => {
                m.clone()
            }
            Error::Domain { function, message } => format!("{function}: {message}"),
            other => other.to_string(),
        }
    }

    /// Short machine-readable category, used by the CLI on its error stream.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::Domain { .. } => "domain",
            Error::Precondition(_) => "precondition",
            Error::OutOfRegion { .. } => "out-of-region",
            Error::VacuousMajorizer { .. } => "vacuous-majorizer",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
