use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("{value} is not representable over {ring}")]
    NotRepresentable { value: String, ring: String },
    #[error("differential does not square to zero on degree {degree}")]
    NotAComplex { degree: i64 },
    #[error("entry from `{from}` to `{to}` violates the degree rule: {reason}")]
    Degree { from: String, to: String, reason: String },
    #[error("not a chain map: {0}")]
    NotAChainMap(String),
    #[error("multicomplex relation fails at k = {0}")]
    Relation(usize),
    #[error("sequence is not short exact: {0}")]
    NotShortExact(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
