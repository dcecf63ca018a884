use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for process exit codes and machine-readable
/// error reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Parse,
    Parameter,
    Geometry,
    Solver,
    Io,
}

impl ErrorCategory {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCategory::Parse => "parse",
            ErrorCategory::Parameter => "parameter",
            ErrorCategory::Geometry => "geometry",
            ErrorCategory::Solver => "solver",
            ErrorCategory::Io => "io",
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Parameter(String),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("Neumann iteration did not converge after {iterations} iterations (last step {last_step:e}, residual {residual:e})")]
    NonConvergence {
        iterations: usize,
        last_step: f64,
        residual: f64,
        last_iterate: Vec<f64>,
    },

    #[error(
        "error bound unavailable: 1 + rho = {shifted} does not exceed the operator norm {norm}"
    )]
    BoundUnavailable { shifted: f64, norm: f64 },

    #[error("oracle normal equations are ill-conditioned: {0}")]
    OracleConditioning(String),

    #[error("all {0} experiment trials failed")]
    ExperimentFailed(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Parse(_) => ErrorCategory::Parse,
            Error::Parameter(_) => ErrorCategory::Parameter,
            Error::Geometry(_) => ErrorCategory::Geometry,
            Error::Numeric(_)
            | Error::NonConvergence { .. }
            | Error::BoundUnavailable { .. }
            | Error::OracleConditioning(_)
            | Error::ExperimentFailed(_) => ErrorCategory::Solver,
            Error::Io(_) => ErrorCategory::Io,
        }
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::Geometry(msg.into())
    }

    pub(crate) fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(msg: impl Into<String>) -> Self {
        Error::Parse(msg.into())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
