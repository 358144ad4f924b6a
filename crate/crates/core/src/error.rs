use thiserror::Error;

/// Errors raised by the algebraic engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {0} vs {1}")]
    VariableMismatch(usize, usize),
    #[error("unknown variable index {0} (ring has {1} variables)")]
    UnknownVariable(usize, usize),
    #[error("division by zero")]
    DivisionByZero,
    #[error("not a unit in the polynomial ring: {0}")]
    NonUnit(String),
    #[error("pole at evaluation point")]
    Pole,
    #[error("point has dimension {got}, expected {expected}")]
    PointDimension { expected: usize, got: usize },
    #[error("truncation order mismatch: {0} vs {1}")]
    OrderMismatch(usize, usize),
    #[error("coefficient is not a real constant: {0}")]
    NotRealConstant(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("poisson tensor is not antisymmetric")]
    NotAntisymmetric,
    #[error("classical part is not invertible")]
    NotInvertible,
    #[error("classical part must be the identity")]
    NotIdentityClassical,
    #[error("series must have vanishing classical part")]
    NonzeroClassicalPart,
    #[error("not idempotent: {0}")]
    NotIdempotent(String),
    #[error("not hermitian: {0}")]
    NotHermitian(String),
    #[error("not unitary: {0}")]
    NotUnitary(String),
    #[error("constraint violated: {0}")]
    Constraint(String),
    #[error("input not in the range of I: {0}")]
    NotInRange(String),
    #[error("first-order cochain is not skew-symmetric")]
    NotSkew,
    #[error("invalid cochain stack: {0}")]
    InvalidStack(String),
    #[error("mismatched classical data: {0}")]
    Mismatch(String),
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
