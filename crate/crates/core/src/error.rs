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

    #[error("{path}:{line}: invalid {field}: {message}")]
    Record {
        path: PathBuf,
        line: usize,
        field: &'static str,
        message: String,
    },

    #[error("homonym spec: {0}")]
    Spec(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("class {class} has no examples")]
    EmptyClass { class: usize },

    #[error("empty vocabulary (no word reaches min_count {min_count})")]
    EmptyVocabulary { min_count: u64 },

    #[error("word not in vocabulary: {0}")]
    OutOfVocabulary(String),

    #[error("non-finite input to forward pass")]
    NonFiniteInput,

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("run {run} failed: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("metrics document: {0}")]
    Document(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
