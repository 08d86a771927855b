use std::io;

use thiserror::Error;

pub type Result<T, E = FqError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FqError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [3, 2^31)")]
    ModulusOutOfRange(u64),
    #[error("context for p = {0} carries no primitive root")]
    MissingPrimitiveRoot(u64),
    #[error("bad parameter: {0}")]
    BadParameter(String),
    #[error("{u} is not coprime to {p}")]
    NotCoprime { u: u64, p: u64 },
    #[error("coefficient vector is divisible by p = {0}")]
    BadCoefficients(u64),
    #[error("sum length {len} exceeds the cap of {cap} terms")]
    TooLong { len: u64, cap: u64 },
    #[error("dimension {0} is not supported by the exact discrepancy routine")]
    DimensionUnsupported(usize),
    #[error("hash parameter out of range: {0}")]
    ParamRange(String),
    #[error("results cache is corrupt: {0}")]
    CacheCorrupt(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl FqError {
    /// True for errors caused by bad caller input rather than the environment.
    pub fn is_precondition(&self) -> bool {
        !matches!(
            self,
            FqError::Io(_) | FqError::Json(_) | FqError::CacheCorrupt(_)
        )
    }
}

impl From<csv::Error> for FqError {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => FqError::Io(e),
            other => FqError::CacheCorrupt(format!("{other:?}")),
        }
    }
}
