use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable groups do not partition the ambient variable set: {0}")]
    NotAPartition(String),
    #[error("variable {0} is outside the ambient variable set")]
    UnknownVariable(String),
    #[error("pole cannot be resolved at the given centers: {0}")]
    UnresolvablePole(String),
    #[error("negative truncation order {0}")]
    NegativeOrder(i64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid Cartan datum: {0}")]
    InvalidDatum(String),
    #[error("invalid quiver: {0}")]
    InvalidQuiver(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("input is not color-symmetric")]
    NonSymmetric,
    #[error("symmetrization left a pole uncancelled along z{b} - z{a}")]
    PoleNotCancelled { a: usize, b: usize },
    #[error("parity condition violated: {0}")]
    Parity(String),
    #[error("window {requested} is below the certified bound {required}")]
    UncertifiedWindow { requested: usize, required: usize },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
