use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("genus {genus} is out of range: {reason}")]
    GenusOutOfRange { genus: i64, reason: &'static str },

    #[error("the {divisor} class needs {expected} genus, got g = {genus}")]
    ParityMismatch {
        genus: i64,
        divisor: &'static str,
        expected: &'static str,
    },

    #[error("expected a positive integer, got {0}")]
    NonPositive(i64),

    #[error("sequence lengths differ ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid vanishing sequence: {0}")]
    InvalidSequence(String),

    #[error("malformed level graph: {0}")]
    MalformedGraph(String),

    #[error("graph {0} is not part of the boundary data")]
    UnknownGraph(String),

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),

    #[error("cannot parse {0:?} as an exact rational")]
    Parse(String),

    /// A structural invariant of the atlas failed. This is never an input
    /// problem; it means the enumeration or the classification is wrong.
    #[error("internal invariant violated: {0}")]
    InvariantViolation(String),
}
