use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("column {column} out of range 1..={n}")]
    ColumnOutOfRange { column: usize, n: usize },

    #[error("invalid loop [{left},{right}] for n = {n}")]
    InvalidLoop { left: usize, right: usize, n: usize },

    #[error("picture needs at least {min} columns, got {n}")]
    TooFewColumns { n: usize, min: usize },

    #[error("column {0} appears twice in the collapse order")]
    DuplicateColumn(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("not a permutation: {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("facet bound for {subset:?} is not well defined: {first} vs {second}")]
    FacetMismatch {
        subset: Vec<usize>,
        first: i64,
        second: i64,
    },

    #[error("generator list is empty")]
    EmptyGenerators,

    #[error("lattice is not weakly compatible to the given picture")]
    NotWeaklyCompatible,

    #[error("p-flag construction failed at loop [{left},{right}]#{copy}: quotient dimension {dim}")]
    FlagFailure {
        left: usize,
        right: usize,
        copy: usize,
        dim: usize,
    },

    #[error("invalid flag point: {0}")]
    InvalidFlagPoint(String),

    #[error("no strongly compatible lattice after {0} draws")]
    RetriesExhausted(usize),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
