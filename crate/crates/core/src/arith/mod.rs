//! Exact arithmetic: integers, finite fields, polynomials over finite fields,
//! truncated Witt vectors of `F_{p^2}` and dense linear algebra.

pub mod embed;
pub mod ff;
pub mod int;
pub mod linalg;
pub mod poly;
pub mod witt;

pub use ff::{ff_arith, FfOp, FiniteField, Gf};
pub use linalg::GfMat;
pub use poly::{factor_poly, Poly};
pub use witt::{Witt, WittRing};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field degree must be positive")]
    ZeroDegree,
    #[error("prime {0} too large for word-sized arithmetic")]
    PrimeTooLarge(u64),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    Mismatch,
    #[error("cannot parse field element {0:?}")]
    Parse(String),
    #[error("zero polynomial has no factorization")]
    ZeroPolynomial,
}
