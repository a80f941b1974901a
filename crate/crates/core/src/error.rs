use thiserror::Error;

/// Errors produced by the ranking toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("edge references unknown paper `{0}`")]
    MissingMetadata(String),

    #[error("malformed record at line {line}: {reason}")]
    MalformedRecord { line: usize, reason: String },

    #[error("duplicate metadata for paper `{0}`")]
    DuplicatePaper(String),

    #[error("test ratio {0} outside [1, 2]")]
    RatioOutOfRange(f64),

    #[error("graph has {0} papers, need at least {1}")]
    TooFewPapers(usize, usize),

    #[error("graph has no citations")]
    EmptyGraph,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("singular linear system")]
    SingularSystem,

    #[error("contraction precondition violated: {0}")]
    ContractionPreconditionViolated(String),

    #[error("no citations originate in the attention window")]
    EmptyWindow,

    #[error("need at least 3 positive tail points, found {0}")]
    InsufficientTail(usize),

    #[error("author data required but missing")]
    MissingAuthors,

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("ideal DCG is zero")]
    ZeroIdeal,

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Short variant name, used in reports and CLI messages.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::MissingMetadata(_) => "MissingMetadata",
            Error::MalformedRecord { .. } => "MalformedRecord",
            Error::DuplicatePaper(_) => "DuplicatePaper",
            Error::RatioOutOfRange(_) => "RatioOutOfRange",
            Error::TooFewPapers(..) => "TooFewPapers",
            Error::EmptyGraph => "EmptyGraph",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::SingularSystem => "SingularSystem",
            Error::ContractionPreconditionViolated(_) => "ContractionPreconditionViolated",
            Error::EmptyWindow => "EmptyWindow",
            Error::InsufficientTail(_) => "InsufficientTail",
            Error::MissingAuthors => "MissingAuthors",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::ZeroIdeal => "ZeroIdeal",
            Error::EmptyGrid => "EmptyGrid",
            Error::Io(_) => "Io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
