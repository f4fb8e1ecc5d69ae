use thiserror::Error;

/// Errors produced by the decoder library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Malformed matrix description. `line` is 1-based; 0 means the error is
    /// not tied to a particular line (e.g. dense input).
    #[error("format error at line {line}: {msg}")]
    Format { line: usize, msg: String },

    /// A check or variable node without edges.
    #[error("degenerate code: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Requested code construction cannot be satisfied.
    #[error("infeasible code parameters: {0}")]
    Infeasible(String),

    #[error("noise variance must be positive, got {0}")]
    NoiseVariance(f64),

    #[error("engine is stopped")]
    EngineStopped,

    #[error("all stream queues are full")]
    QueueFull,

    #[error("i/o error: {0}")]
    Io(String),

    #[error("failed to start worker: {0}")]
    Startup(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn format(line: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            line,
            msg: msg.into(),
        }
    }
}
