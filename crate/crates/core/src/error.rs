use thiserror::Error;

/// Errors raised by the engine. Each variant names a domain failure; none of
/// them leave partially applied state behind.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("degenerate curve")]
    DegenerateCurve,
    #[error("count mismatch: {0} vs {1} points")]
    CountMismatch(usize, usize),
    #[error("rank deficient: source points are coincident")]
    RankDeficient,
    #[error("non-finite coordinate")]
    NonFinite,

    #[error("unknown attribute: {0}")]
    UnknownAttribute(String),
    #[error("range violation: {path} = {value}")]
    RangeViolation { path: String, value: f64 },
    #[error("unbounded attribute: {0}")]
    UnboundedAttribute(String),
    #[error("unknown object: {0}")]
    UnknownObject(String),
    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("unknown squidget: {0}")]
    UnknownSquidget(String),
    #[error("unknown canvas: {0}")]
    UnknownCanvas(String),
    #[error("not a connect gesture")]
    NotAConnectGesture,
    #[error("nested squidget cycle through {0}")]
    NestingCycle(String),
    #[error("no canvas under stroke")]
    NoCanvas,
    #[error("canvas region must have positive area")]
    EmptyRegion,

    #[error("event rejected: {0}")]
    EventRejected(String),
    #[error("malformed log at event {index}: {reason}")]
    MalformedLog { index: usize, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unsupported document version {found} (expected {expected})")]
    Version { found: i64, expected: i64 },
    #[error("hash mismatch: {0}")]
    HashMismatch(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
