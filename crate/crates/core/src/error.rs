use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid rotation system: {0}")]
    Rotation(String),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("cutting along the edge set separates the surface")]
    Separating,
    #[error("edge set has the wrong shape for surgery: {0}")]
    Shape(String),
    #[error("edge set is not even: vertex {0} has odd degree")]
    NotEven(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("genus {genus} exceeds the configured maximum {max}")]
    GenusExceeded { genus: usize, max: usize },
    #[error("no path or cycle exists in homology class {0}")]
    UnreachableClass(String),
    #[error("minimum cuts cross: {0}")]
    CrossingCuts(String),
    #[error("malformed hierarchical path: {0}")]
    MalformedPath(String),
}

impl Error {
    /// Process exit status for a command that failed with this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } | Error::Rotation(_) | Error::Disconnected => 2,
            Error::GenusExceeded { .. } => 3,
            Error::CrossingCuts(_) => 4,
            _ => 1,
        }
    }
}
