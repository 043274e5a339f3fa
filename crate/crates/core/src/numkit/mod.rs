//! Complex linear algebra and quadrature for small dense operators (dimension ≤ 9).
//!
//! Generators follow the physics convention `U = exp(−iHt)` with `ħ = 1` everywhere.

mod eigen;
mod matrix;
mod pauli;
mod quad;

pub use eigen::{
    eigh, expm_hermitian_generator, principal_log_unitary, HermitianEigen, BRANCH_MARGIN,
    HERMITIAN_TOL, UNITARY_TOL,
};
pub use matrix::{ops, ComplexMatrix, MAX_DIM};
pub use num_complex::Complex64;
pub use pauli::{pauli_decompose, pauli_product, Pauli, PauliCoefficients};
pub use quad::{gauss_nodes, quad_integrate, Integrand, DEFAULT_PANELS};

pub(crate) use matrix::{I, ONE, ZERO};
