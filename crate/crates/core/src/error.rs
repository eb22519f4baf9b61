use std::path::PathBuf;

use thiserror::Error;

use crate::ingest::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} `{id}`")]
    NotFound { kind: &'static str, id: String },

    #[error("unknown query `{query}`; supported queries: {}", known.join(", "))]
    UnknownQuery { query: String, known: Vec<String> },

    #[error("unknown method `{0}`; expected one of rw, lrw, pagerank, betweenness, closeness, degree")]
    UnknownMethod(String),

    #[error("invalid query: {0}")]
    InvalidQuery(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("{path}:{line}: malformed record: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dataset failed validation:\n{0}")]
    Invalid(ValidationReport),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn not_found(kind: &'static str, id: impl Into<String>) -> Self {
        Error::NotFound {
            kind,
            id: id.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
