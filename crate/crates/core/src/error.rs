use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid map: {0}")]
    InvalidMap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("point {point} is outside the domain of the map")]
    OutsideDomain { point: String },
    #[error("evaluation at {point} exceeded the iteration cap after {iterations} unwindings")]
    IterationCap { point: String, iterations: u64 },
    #[error("rotation number not certified rational: it lies in [{lo}, {hi}]")]
    Uncertified { lo: String, hi: String },
    #[error("unsatisfiable constraint: {0}")]
    Unsatisfiable(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
