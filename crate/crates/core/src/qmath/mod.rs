//! Dense complex linear algebra: matrices, tensor products, partial traces,
//! Hermitian eigendecomposition, entropies and seeded random generators.

pub mod eigen;
pub mod entropy;
pub mod matrix;
pub mod random;

pub use eigen::{hermitian_eigensystem, hermitian_eigensystem_with, hermitian_eigenvalues, Eigensystem};
pub use entropy::{binary_entropy, entropy_of_spectrum, shannon_entropy, von_neumann_entropy, von_neumann_entropy_with};
pub use matrix::{partial_trace, tensor_product, ComplexMatrix, DimensionList, C64, MAX_TOTAL_DIMENSION};
pub use random::{
    complex_gaussian, ginibre, random_density, random_density_with, random_hermitian, random_isometry_with,
    random_pure_state, random_pure_state_with, random_simplex, random_unitary, random_unitary_with, rng_from_seed,
    QRng,
};

/// Numerical tolerances shared by validation and entropy evaluation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Relative max-norm bound on `m − m†`.
    pub herm: f64,
    /// Most negative eigenvalue still accepted as PSD.
    pub psd: f64,
    /// Allowed deviation of a trace from 1.
    pub trace: f64,
    /// Eigenvalues at or below this count as exactly zero in entropies.
    pub eig_floor: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            herm: 1e-10,
            psd: 1e-9,
            trace: 1e-9,
            eig_floor: 1e-12,
        }
    }
}
