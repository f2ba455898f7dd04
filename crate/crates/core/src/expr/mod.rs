//! Multivariate polynomials with exact rational coefficients.
//!
//! Vector fields, invariant hypersurfaces and cofactor entries are all
//! stored as [`Polynomial`]s so that invariance identities can be checked
//! exactly. Floating point only enters through [`Polynomial::evaluate`] and
//! the compiled [`NumericPolynomial`].

mod parse;
mod polynomial;

pub use parse::{parse_polynomial, parse_polynomial_with, parse_rational};
pub use polynomial::{combine, CombineOp, NumericPolynomial, Polynomial};

use thiserror::Error;

/// Exact rational number, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("variable lists differ: {left:?} vs {right:?}")]
    VariableMismatch {
        left: Vec<String>,
        right: Vec<String>,
    },
}

/// Exact conversion of a finite `f64` into a rational.
pub fn rational_from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}
