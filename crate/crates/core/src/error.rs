use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("ingest error in {doc_id}: {msg}")]
    Ingest { doc_id: String, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed tag: {0}")]
    Tag(String),

    /// Malformed input file. `line` is 1-based.
    #[error("{source_name}:{line}: {msg}")]
    Format {
        source_name: String,
        line: usize,
        msg: String,
    },

    #[error("cannot build transition matrix: {0}")]
    Build(String),

    #[error("generation reached a dead end after {} tags: {msg}", partial.len())]
    Generation { msg: String, partial: Vec<String> },

    #[error("untemplatable sentence {source_id}: {msg}")]
    Template { source_id: String, msg: String },

    #[error("template store is empty")]
    EmptyStore,

    #[error("cannot train embeddings: {0}")]
    Train(String),

    #[error("out of vocabulary: {0:?}")]
    Oov(String),

    #[error("no function-word dictionary entry for tag {0}")]
    Dict(String),

    #[error("no word fits tag {tag} after {hops} query relaxations (visited {visited:?})")]
    Relaxation {
        tag: String,
        hops: usize,
        visited: Vec<String>,
    },

    #[error("tag {0} is absent from the associative table")]
    Table(String),

    #[error("no in-vocabulary candidates for tag {tag}")]
    EmptyRank { tag: String },

    #[error("degenerate score: {0}")]
    DegenerateScore(String),

    #[error("slot {position}: {source}")]
    Slot {
        position: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(source_name: impl Into<String>, line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            source_name: source_name.into(),
            line,
            msg: msg.into(),
        }
    }

    pub(crate) fn at_slot(self, position: usize) -> Self {
        match self {
            e @ Error::Slot { .. } => e,
            e => Error::Slot {
                position,
                source: Box::new(e),
            },
        }
    }

    /// The innermost error, looking through slot context.
    pub fn root(&self) -> &Error {
        match self {
            Error::Slot { source, .. } => source.root(),
            e => e,
        }
    }
}
