use thiserror::Error;

/// Errors produced by the analysis engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("word length {0} is outside 1..=63")]
    WordLength(usize),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("invalid character {0:?} in bit string")]
    InvalidBitChar(char),
    #[error("coordinate {index} out of range for length {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("generator matrix is not in systematic form [I | P]")]
    NotSystematic,
    #[error("code length {n} exceeds the word cap of 63")]
    LengthOverCap { n: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),
    #[error("code has no nonzero codewords")]
    TrivialCode,
    #[error("dimension {k} too large to enumerate (limit {limit})")]
    DimensionOverCap { k: usize, limit: usize },
    #[error("length {n} exceeds brute-force cap {cap}")]
    BruteForceCap { n: usize, cap: usize },
    #[error("probability {0} is not strictly between 0 and 1")]
    ProbabilityOutOfRange(String),
    #[error("indicator is not upward closed")]
    NotMonotone,
    #[error("closed form requires part size >= 2; use brute force (coordinate {j} lies in a part of size 1)")]
    PartTooSmall { j: usize },
    #[error("hypothesis S_{i} = S_{j} does not hold")]
    SupportSetsDiffer { i: usize, j: usize },
    #[error("vacuous bound: total influence is zero")]
    VacuousBound,
    #[error("epsilon {0} is not in (0, 1/2)")]
    EpsilonOutOfRange(String),
    #[error("malformed blob: {0}")]
    MalformedBlob(String),
}

pub type Result<T> = std::result::Result<T, Error>;
