//! Decide whether the quotient set of values of a quadratic form is dense in
//! the field of p-adic numbers, and corroborate every verdict by brute force.
//!
//! The symbolic side lives in [`padic`], [`square_class`], [`form`] and
//! [`density`]; [`oracle`] enumerates integer arguments independently and
//! reports which square classes and residue balls the quotients reach.

pub mod cli;
pub mod density;
pub mod form;
pub mod oracle;
pub mod padic;
pub mod square_class;

mod error;

pub use density::{
    is_dense, is_dense_nonnegative_restricted, is_dense_via_classes, represents_positive_over_n,
    represents_positive_over_z, verdict_via_classes, BinaryWitness, Branch, Decision,
    DensityVerdict, Domain, PositivityStatus, RestrictedVerdict,
};
pub use error::{Error, Result};
pub use form::{DiagonalForm, PivotStrategy, QuadraticForm};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
pub use oracle::{OracleConfig, OracleReport, SampleCounts, ValueSet};
pub use padic::{ExtendedValuation, Prime};
pub use square_class::{Place, SquareClass};

/// Shorthand for building an exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}
