use std::path::PathBuf;

use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Param(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid partition: part {part}: {reason}")]
    Partition { part: usize, reason: String },

    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },

    #[error("codes are not equivalent")]
    Inequivalent,

    #[error("order-{0} Latin square enumeration is out of range; ingest a seed registry instead")]
    SeedRequired(usize),

    #[error("search guardrail: {what} ({count} > cap {cap}); raise the cap and rerun to resume")]
    Guardrail { what: &'static str, count: u128, cap: u128 },

    #[error("dependency fault: {0}")]
    Dependency(String),

    #[error("registry incomplete: {0}")]
    Incomplete(String),

    #[error("consistency check failed for {step}: lhs={lhs} rhs={rhs}")]
    Consistency { step: String, lhs: BigUint, rhs: BigUint },

    #[error("verification failed: {0}")]
    Verify(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }
}
