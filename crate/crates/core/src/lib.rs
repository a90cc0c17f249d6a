//! Solving, verifying and constructing solutions of the matrix equation
//! `exp(z(A - I)) = A` over dense complex matrices.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: dense complex matrices and structural predicates.
//! * [`specfun`]: branch-indexed logarithm and the multi-branch Lambert W function.
//! * [`spectral`]: eigenvalues via Hessenberg reduction and shifted QR, eigenvalue
//!   grouping, Haar-random unitaries.
//! * [`matfun`]: matrix exponential and power-basis expansion of `exp(zA)`.
//! * [`solver`]: classification and enumeration of the `z` that solve the equation.
//! * [`quantum`]: Pauli matrices, gate catalog, the Pauli group and the
//!   propagator identity for involutory Hamiltonians.

pub mod error;
pub mod linalg;
pub mod matfun;
pub mod quantum;
pub mod solver;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use linalg::CMatrix;
pub use num_complex::Complex64;
pub use specfun::BranchIndex;

/// Shorthand for building a [`Complex64`].
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}
