use thiserror::Error;

/// Errors raised by the core calculus.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {found}")]
    RankMismatch { expected: usize, found: usize },
    #[error("generator index {index} out of range for acting rank {rank}")]
    GeneratorOutOfRange { index: usize, rank: usize },
    #[error("finite-index restriction needs positive indices, got {0}")]
    NonPositiveIndex(i64),
    #[error("label `{0}` is not part of the space")]
    UnknownLabel(String),
    #[error("label index {0} is out of range")]
    LabelOutOfRange(usize),
    #[error("objects live on different spaces or stalk profiles")]
    SpaceMismatch,
    #[error("malformed descriptor: {0}")]
    MalformedDescriptor(String),
    #[error("section is not finitely supported along generator {generator}")]
    InfiniteSupport { generator: usize },
    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error("degree {degree} out of range (acting rank {rank})")]
    DegreeOutOfRange { degree: usize, rank: usize },
    #[error("quotient map does not originate at this space")]
    QuotientMismatch,
    #[error("unrepresentable: {0}")]
    Unrepresentable(String),
    #[error("hypotheses fail: {0}")]
    HypothesesFail(String),
    #[error("period must be positive")]
    NonPositivePeriod,
    #[error("invalid piecewise-linear data: {0}")]
    InvalidPiecewiseLinear(String),
    #[error("invalid coefficient `{value}` for ring {ring}")]
    InvalidCoefficient { value: String, ring: String },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
