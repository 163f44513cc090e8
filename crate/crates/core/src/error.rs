use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown identifier `{name}` at line {line}, column {column}")]
    UnknownIdentifier {
        name: String,
        line: usize,
        column: usize,
    },

    #[error("variable x{index} out of range for domain dimension {dim} (line {line}, column {column})")]
    VariableOutOfRange {
        index: usize,
        dim: usize,
        line: usize,
        column: usize,
    },

    #[error("domain violation: {0}")]
    Domain(String),

    #[error("point {point:?} lies outside the domain box")]
    OutsideBox { point: Vec<f64> },

    #[error("metric not positive-definite (smallest eigenvalue {min_eigenvalue:e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("metric entry ({0},{1}) differs from entry ({1},{0})")]
    AsymmetricMetric(usize, usize),

    #[error("not a submersion at p: numerical rank {rank} < {expected}")]
    NotSubmersion { rank: usize, expected: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension not divisible by 4 (got {0})")]
    StructureDimension(usize),

    #[error("vector is not vertical (angle to vertical space {0:e})")]
    NotVertical(f64),

    #[error("vector is not horizontal (angle to horizontal space {0:e})")]
    NotHorizontal(f64),

    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),

    #[error("manifest: {0}")]
    Manifest(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
