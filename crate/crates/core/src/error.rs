use thiserror::Error;

/// Errors produced across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid diagram point ({x}, {y}): {reason}")]
    InvalidPoint { x: f64, y: f64, reason: &'static str },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("matching references missing index")]
    MissingIndex,

    #[error("matching is not a bijection: index {index} used twice")]
    NotBijection { index: usize },

    #[error("invalid order {0}: must be at least 1")]
    InvalidOrder(f64),

    #[error("oracle limit: {size} points exceed the enumeration bound {limit}")]
    OracleLimit { size: usize, limit: usize },

    #[error("{0}")]
    Axiom(#[from] crate::space::AxiomViolation),

    #[error("scale violates hypothesis: c = {scale} must exceed the diameter {diameter}")]
    ScaleTooSmall { scale: f64, diameter: f64 },

    #[error("grid too large: {n}^{m} points exceed the cap {cap}")]
    GridTooLarge { n: usize, m: usize, cap: usize },

    #[error("duplicate block ({0}, {1})")]
    DuplicateBlock(usize, usize),

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("index {index} out of range for {len} points")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("not a kernel: minimum eigenvalue {min_eigenvalue} below tolerance")]
    NotAKernel { min_eigenvalue: f64 },

    #[error("not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),

    #[error("invalid filtration: {0}")]
    Filtration(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
