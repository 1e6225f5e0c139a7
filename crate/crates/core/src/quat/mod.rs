//! The definite quaternion algebra ramified at `p` and `∞`, its maximal
//! orders, right ideals and the local maps at `p` and at primes `ℓ ≠ p`.

pub mod algebra;
pub mod ideal;
pub mod lattice;
pub mod local;
pub mod order;
pub mod short;

pub use algebra::{hilbert_symbol, Place, QuatAlgebra, QuatElem, Rat};
pub use ideal::{ideal_classes, is_equivalent, right_ideals_of_norm, solve_norm, ClassInfo, RightIdeal};
pub use lattice::Lattice;
pub use local::{reduce_mod_p, split_mod_n, Reduction, Splitting};
pub use order::{build_algebra, MaximalOrder};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuatError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("no verified maximal order recipe for p = {0}")]
    Construction(u64),
    #[error("lattice is not an order: {0}")]
    NotAnOrder(&'static str),
    #[error("norm equation search exhausted its bound")]
    SearchExhausted,
    #[error("norm must be positive")]
    NonPositiveNorm,
    #[error("ell = {0} must be a prime different from p")]
    BadEll(u64),
    #[error("level {n} must be coprime to p = {p}")]
    LevelNotCoprime { n: u64, p: u64 },
    #[error("class enumeration incomplete: mass {got} differs from {expected}")]
    MassMismatch { got: String, expected: String },
}
