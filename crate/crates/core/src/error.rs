use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("missing file: {}", .0.display())]
    MissingFile(PathBuf),

    #[error("{}:{line}: {msg}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{}:{line}: id out of range: {id} >= {count} ({vertex_type})", path.display())]
    IdOutOfRange {
        path: PathBuf,
        line: usize,
        id: u64,
        count: u32,
        vertex_type: String,
    },

    #[error("{}: {source}", path.display())]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("invalid schema: {0}")]
    Schema(String),

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("unknown vertex type `{0}`")]
    UnknownType(String),

    #[error("invalid metapath `{path}`: {reason}")]
    InvalidMetapath { path: String, reason: String },

    #[error("undecomposable metapath `{0}`")]
    Undecomposable(String),

    #[error("type mismatch at junction: `{left}` ends at {left_end}, `{right}` starts at {right_start}")]
    TypeMismatch {
        left: String,
        left_end: String,
        right: String,
        right_start: String,
    },

    #[error("relation `{relation}`: {requested} edges requested but only {capacity} distinct pairs exist")]
    InfeasibleEdges {
        relation: String,
        requested: u64,
        capacity: u64,
    },

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
