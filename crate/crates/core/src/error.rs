use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("line {line}: malformed record: {message}")]
    MalformedLine { line: usize, message: String },

    #[error("line {line}: {message}")]
    InvalidRecord { line: usize, message: String },

    #[error("duplicate id `{id}` on lines {first_line} and {second_line}")]
    DuplicateId {
        id: String,
        first_line: usize,
        second_line: usize,
    },

    #[error("line {line}: record `{id}` references unknown source `{source_id}`")]
    DanglingSource {
        line: usize,
        id: String,
        source_id: String,
    },

    #[error("line {line}: record `{id}` references `{source_id}`, which is itself a candidate")]
    ChainedCandidate {
        line: usize,
        id: String,
        source_id: String,
    },

    #[error("embedding record `{id}`: {count_tokens} tokens but {count_vectors} vectors")]
    TokenVectorMismatch {
        id: String,
        count_tokens: usize,
        count_vectors: usize,
    },

    #[error("embedding record `{id}`: dimension {found} does not match expected {expected}")]
    DimensionMismatch {
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("embedding record `{id}`: {message}")]
    InvalidEmbedding { id: String, message: String },

    #[error("duplicate embedding record `{0}`")]
    DuplicateEmbedding(String),

    #[error("no embedding for record `{0}`")]
    MissingEmbedding(String),

    #[error("vector dimensions differ: {0} vs {1}")]
    VectorDimension(usize, usize),

    #[error("cosine undefined for a zero-norm vector")]
    ZeroNorm,

    #[error("{metric} is undefined for an empty {which} sequence")]
    EmptyInput {
        metric: &'static str,
        which: &'static str,
    },

    #[error("n-gram order must be at least 1")]
    ZeroOrder,

    #[error("non-finite score {value} at candidate {index}")]
    NonFiniteScore { index: usize, value: f64 },

    #[error("candidate index {index} out of range for group of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0}")]
    Config(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
