use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: String,
        range: &'static str,
    },

    #[error("vector norm {norm} is not 1 within tolerance")]
    NotUnit { norm: f64 },

    #[error("margin sampler gave up after {attempts} consecutive rejections (gamma too close to 1?)")]
    RejectionBudget { attempts: u64 },

    #[error("near-orthogonal sampling gave up after {attempts} draws with {accepted} vectors accepted")]
    FamilyBudget { attempts: u64, accepted: usize },

    #[error("exact enumeration is capped at d = {cap}, requested d = {d}")]
    ExactBudget { d: usize, cap: usize },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn out_of_range(name: &'static str, value: impl ToString, range: &'static str) -> Error {
    Error::OutOfRange {
        name,
        value: value.to_string(),
        range,
    }
}
