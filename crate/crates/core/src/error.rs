use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polynomial of degree {degree} cannot be reversed at order {order}")]
    ReversalOrder { degree: usize, order: isize },
    #[error("singular linear system of size {size}")]
    Singular { size: usize },
    #[error("parameter {index} has unit modulus")]
    UnitModulus { index: usize },
    #[error("sequence too short: need {needed}, have {have}")]
    TooShort { needed: usize, have: usize },
    #[error("zero polynomial where a nonzero one is required")]
    ZeroPolynomial,
    #[error("not hermitian: {0}")]
    NotHermitian(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("evaluation at a singular point: {0}")]
    Pole(String),
}

pub type Result<T> = std::result::Result<T, Error>;
