use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported root system: {0}")]
    UnsupportedRootSystem(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("zero vector")]
    ZeroVector,
    #[error("not a root: {0}")]
    NotARoot(String),
    #[error("roots are collinear")]
    Collinear,
    #[error("no matrix realization; root-level only ({0})")]
    NoMatrixRealization(String),
    #[error("algebra spec mismatch")]
    SpecMismatch,
    #[error("not a subalgebra (closure residual {0:.3e})")]
    NotSubalgebra(f64),
    #[error("degenerate subalgebra: {0}")]
    DegenerateSubalgebra(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Hessian undefined at origin")]
    HessianAtOrigin,
    #[error("Gram matrix not positive definite at the base point")]
    GramNotPositive,
    #[error("degenerate flag")]
    DegenerateFlag,
    #[error("commutative-pair formula inapplicable: {0}")]
    CommutativeInapplicable(String),
    #[error("not odd-dimensional positively curved candidate: {0}")]
    RankEquality(String),
    #[error("wrong case: {0}")]
    WrongCase(String),
    #[error("not a diagonal A1 of the required form: {0}")]
    NotDiagonalA1(String),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
