use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field mismatch: {0}")]
    FieldMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("linear operator L is singular: {0}")]
    SingularOperator(String),

    #[error("stabilizing factor denominator is degenerate ({value:e})")]
    DegenerateDenominator { value: f64 },

    #[error("stabilizing factor ratio {ratio:e} is negative and gamma = {gamma} is not an integer")]
    NegativeFactorBase { ratio: f64, gamma: f64 },

    #[error("factor violates |p + q| < 1: p = {p}, q = {q}")]
    PropertyViolation { p: f64, q: f64 },

    #[error("inner map is not homogeneous: {0}")]
    NotHomogeneous(String),

    #[error("malformed factor descriptor `{0}`")]
    Descriptor(String),

    #[error("problem does not provide the Jacobian of N")]
    MissingJacobian,

    #[error("initial iterate must be nonzero and finite")]
    InvalidSeed,

    #[error("Newton iteration hit a singular Jacobian: {0}")]
    SingularJacobian(String),

    #[error("eigensolver did not converge: {0}")]
    EigenSolver(String),

    #[error("ill-conditioned Gram matrix (condition number {0:e})")]
    IllConditionedGram(f64),

    #[error("phase window too small: {0} nodes")]
    WindowTooSmall(usize),

    #[error("no modulus peak found")]
    NoPeak,

    #[error("invalid homotopy path: {0}")]
    InvalidPath(String),
}
