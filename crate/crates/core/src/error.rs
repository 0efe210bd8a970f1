use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("the valuation of zero is infinite")]
    ZeroArgument,
    #[error("the Legendre symbol needs an odd prime, got 2")]
    EvenPrime,
    #[error("square classes belong to different primes ({0} and {1})")]
    PrimeMismatch(u64, u64),
    #[error("expected a vector of length {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("all coefficients are zero")]
    ZeroForm,
    #[error("form dimension must be at least 1")]
    EmptyForm,
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("form is singular: the determinant of its Gram matrix is zero")]
    SingularForm,
    #[error("binary discriminant needs n = 2, got n = {0}")]
    NotBinary(usize),
    #[error("no nonzero value in the argument box, the quotient set is empty")]
    EmptyQuotientSet,
    #[error("enumeration of {points} points exceeds the budget of {budget}")]
    BudgetExceeded { points: u128, budget: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
