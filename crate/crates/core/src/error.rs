use thiserror::Error;

/// Errors raised while building or querying tensors, forms and certificates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("order m = {0} must be at least 2")]
    OrderTooSmall(usize),

    #[error("dimension n = {0} must be at least 2")]
    DimensionTooSmall(usize),

    #[error("generating vector has length {got}, expected (n-1)*m+1 = {expected}")]
    GeneratingLength { expected: usize, got: usize },

    #[error("circulant index r = {r} outside the admissible range 1..={max}")]
    CirculantIndex { r: usize, max: usize },

    #[error("seed has length {got}, expected the circulant index r = {expected}")]
    SeedLength { expected: usize, got: usize },

    #[error("index tuple has {got} entries, expected m = {expected}")]
    IndexArity { expected: usize, got: usize },

    #[error("index {index} at position {position} is outside 1..={dim}")]
    IndexOutOfRange { position: usize, index: usize, dim: usize },

    #[error("order m = {0} is odd; semi-definiteness needs an even order")]
    OddOrder(usize),

    #[error("vector has length {got}, expected the dimension n = {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dense enumeration needs n^m = {dim}^{order} entries, above the cap of {cap}")]
    DenseCapExceeded { dim: usize, order: usize, cap: usize },

    #[error("witness family `{family}` needs dimension n >= {min}, got {dim}")]
    FamilyTooSmall { family: &'static str, min: usize, dim: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare { row: usize, expected: usize, got: usize },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("period must be at least 2, got {0}")]
    PeriodTooSmall(usize),

    #[error("binomial order M must be at least 1")]
    ZeroBinomialOrder,

    #[error("modulus r must be at least 1")]
    ZeroModulus,

    #[error("pattern must have between 1 and 4 entries, got {0}")]
    PatternLength(usize),

    #[error("optimizer needs at least one start")]
    NoStarts,

    #[error("zero vector is not a valid witness")]
    ZeroWitness,
}

pub type Result<T> = std::result::Result<T, Error>;
