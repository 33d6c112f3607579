use thiserror::Error;

/// Errors produced by any stage of the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty lexicon")]
    EmptyLexicon,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unknown label {value:?} at line {line}")]
    UnknownLabel { value: String, line: usize },

    #[error("size mismatch: {0}")]
    SizeMismatch(String),

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("degenerate training set")]
    DegenerateTrainingSet,

    #[error("word length below pooling depth")]
    WordLengthBelowPoolingDepth,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("all-zero confusion matrix")]
    EmptyConfusion,

    #[error("label set mismatch: {0}")]
    LabelSetMismatch(String),

    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
