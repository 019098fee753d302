//! Dense complex linear algebra and two-qubit state primitives.

pub mod bell;
pub mod density;
pub mod eig;
pub mod matrix;
pub mod metrics;

pub use bell::{bell_state, bell_state_on, werner_parameter, werner_state, werner_state_on, BellKind};
pub use density::{DensityMatrix, HilbertSpec, StateDiagnostics, Subsystem, TRACE_TOL};
pub use eig::{hermitian_eig, hermitian_eigenvalues, matrix_sqrt_psd, HermitianEigen};
pub use matrix::{
    annihilation, basis_vector, embed, number, sigma_x, sigma_y, sigma_z, ComplexMatrix, C64, DEFAULT_TOL,
};
pub use metrics::{concurrence, fidelity, spin_flip};

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Reduced state on `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[&str]) -> crate::Result<DensityMatrix> {
    rho.partial_trace(keep)
}
