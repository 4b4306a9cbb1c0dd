use std::path::PathBuf;

/// Errors produced by corpus ingestion, training, encoding, and the
/// evaluation harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid budget: k must be positive")]
    InvalidBudget,

    #[error("occurrence mismatch: token does not occur in word {word} at position {pos}")]
    OccurrenceMismatch { word: usize, pos: usize },

    #[error("invalid cover: word {word} position {pos} conflicts with the current state")]
    InvalidCover { word: usize, pos: usize },

    #[error("oracle limit exceeded: {0}")]
    OracleLimit(String),

    #[error("degenerate instance: relaxation objective is zero")]
    DegenerateInstance,

    #[error("invalid token id {0}")]
    InvalidTokenId(u32),

    #[error("word cannot be segmented: no probability covers position {pos}")]
    Unsegmentable { pos: usize },

    #[error("reduction guard exceeded: {vertices} vertices > {limit}")]
    ReductionGuard { vertices: usize, limit: usize },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
