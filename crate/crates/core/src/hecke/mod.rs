//! Weights of `GU_g(F_{p^2})`, Hecke operators on the class set with a weight
//! character, simultaneous eigensystems over `F̄_p` and Galois descent.

pub mod brandt;
pub mod descent;
pub mod eigen;
pub mod weight;

pub use brandt::{
    brandt_data, brandt_operator, class_edges, coset_reps, gsp_matrix, pullback_matrix, same_left_coset,
    sweep_characters, weight_basis, BrandtData, HeckeOperator,
};
pub use descent::{galois_descend, restrict_scalars};
pub use eigen::{eigensystems, Eigensystem};
pub use weight::{eval_weight, Weight};

use crate::classset::ClassSetError;
use crate::quat::QuatError;

#[derive(Debug, thiserror::Error)]
pub enum HeckeError {
    #[error("ell = {ell} divides pN = {pn}")]
    BadEll { ell: u64, pn: u64 },
    #[error("operators do not commute")]
    NotCommuting,
    #[error("matrix is not a unitary similitude")]
    NotSimilitude,
    #[error("weight {0} is not available here")]
    UnsupportedWeight(String),
    #[error("vector is not a joint eigenvector")]
    NotEigenvector,
    #[error(transparent)]
    Quat(#[from] QuatError),
    #[error(transparent)]
    ClassSet(#[from] ClassSetError),
}
