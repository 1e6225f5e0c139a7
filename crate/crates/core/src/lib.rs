//! Supersingular quaternionic class sets, weighted Brandt operators and their
//! mod-`p` Hecke eigensystems, with the supporting exact arithmetic.

pub mod arith;
pub mod classset;
pub mod dieudonne;
pub mod hecke;
pub mod hermitian;
pub mod oracle;
pub mod quat;
