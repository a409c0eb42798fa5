use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants fall into three families that the CLI maps onto distinct exit
/// codes: input problems (bad values, parse failures, I/O), numerical
/// failures (domain violations, lost contact, singular fits), and
/// requirement violations raised by the planners.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("geometry domain error: {0}")]
    Domain(String),

    #[error(
        "contact lost at d = {d} mm: no sign change on z in [{z_lo}, {z_hi}] \
         (g = {g_lo:.6e} .. {g_hi:.6e})"
    )]
    NoSignChange {
        d: f64,
        z_lo: f64,
        z_hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("bisection did not converge after {iterations} iterations (d = {d} mm)")]
    NotConverged { d: f64, iterations: usize },

    #[error("singular normal system: {0}")]
    SingularFit(String),

    #[error("simulation failed at t = {t} s: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("requirement violated: {what} = {value} exceeds limit {limit}")]
    Requirement {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Broad outcome category of an error.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Numerical,
    Requirement,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Csv(_) | Error::Io(_) => {
                ErrorKind::Input
            }
            Error::Requirement { .. } => ErrorKind::Requirement,
            Error::AtTime { source, .. } => source.kind(),
            Error::Domain(_)
            | Error::NoSignChange { .. }
            | Error::NotConverged { .. }
            | Error::SingularFit(_) => ErrorKind::Numerical,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
