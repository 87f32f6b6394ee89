use thiserror::Error;

use crate::format::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("malformed problem: {0}")]
    Structure(String),
    #[error("node budget of {0} exhausted")]
    BudgetExceeded(usize),
    #[error("usage error: {0}")]
    Usage(String),
}
