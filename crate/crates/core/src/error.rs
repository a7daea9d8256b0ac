use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A malformed input record. `record` is 1-based.
    #[error("format error at record {record}: {message}")]
    Format { record: usize, message: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero vector has no cosine similarity")]
    ZeroVector,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid k = {k} for {n} vertices (need 1 <= k <= n - 1)")]
    InvalidK { k: usize, n: usize },

    #[error("invalid part count K = {parts} for {n} vertices")]
    InvalidParts { parts: usize, n: usize },

    #[error("index {index} out of range for {len} vertices")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("empty vertex set")]
    EmptyVertexSet,

    #[error("partition covers {found} vertices but graph has {expected}")]
    PartitionMismatch { expected: usize, found: usize },

    #[error("graph has {n} vertices, at least 2 required")]
    GraphTooSmall { n: usize },

    #[error("graph has {n} vertices, exhaustive search is limited to {max}")]
    GraphTooLarge { n: usize, max: usize },

    #[error("invalid bisection: {0}")]
    InvalidBisection(String),

    #[error("budget {budget} exceeds the {n} available vertices")]
    BudgetExceedsVertices { budget: usize, n: usize },

    #[error("budget {budget} exceeds pool size {n}")]
    BudgetExceedsPool { budget: usize, n: usize },

    #[error("power iteration did not converge after {iters} iterations (L1 change {delta:e})")]
    NonConvergence { iters: usize, delta: f64 },

    #[error("selection is empty")]
    EmptySelection,

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::FileNotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    pub(crate) fn format(record: usize, message: impl Into<String>) -> Self {
        Error::Format {
            record,
            message: message.into(),
        }
    }

    /// Process exit code: 1 for input errors, 2 for bad parameters,
    /// 3 for internal invariant violations.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::FileNotFound(_) | Error::Io { .. } | Error::Format { .. } => 1,
            Error::Invariant(_) | Error::NonConvergence { .. } => 3,
            _ => 2,
        }
    }
}
