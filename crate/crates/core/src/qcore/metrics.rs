//! Entanglement and state-distance measures.

use super::density::DensityMatrix;
use super::eig::{hermitian_eigenvalues, matrix_sqrt_psd, trace_sqrt_psd};
use super::matrix::{sigma_y, ComplexMatrix};
use crate::error::{Error, Result};

/// Spin-flipped state `(sy (x) sy) rho* (sy (x) sy)`.
pub fn spin_flip(rho: &ComplexMatrix) -> ComplexMatrix {
    let yy = sigma_y().kron(&sigma_y());
    &(&yy * &rho.conj()) * &yy
}

/// Two-qubit concurrence.
///
/// The square roots of the eigenvalues of `rho rho~` are the eigenvalues of
/// `sqrt(sqrt(rho) rho~ sqrt(rho))`, which is Hermitian, so only a Hermitian
/// eigensolver is needed.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Shape(format!(
            "concurrence is defined for 4x4 two-qubit states, got {}x{}",
            rho.dim(),
            rho.dim()
        )));
    }
    let sqrt_rho = matrix_sqrt_psd(rho.matrix())?;
    let tilde = spin_flip(rho.matrix());
    let inner = &(&sqrt_rho * &tilde) * &sqrt_rho;
    let inner = (&inner + &inner.adjoint()).scale_real(0.5);
    let lambdas: Vec<f64> = hermitian_eigenvalues(&inner)?.into_iter().map(|x| x.max(0.0).sqrt()).collect();
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.clamp(0.0, 1.0))
}

/// Uhlmann fidelity `(tr sqrt(sqrt(rho) sigma sqrt(rho)))^2`.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::Shape(format!("fidelity between {0}x{0} and {1}x{1} states", rho.dim(), sigma.dim())));
    }
    let sqrt_rho = matrix_sqrt_psd(rho.matrix())?;
    let inner = &(&sqrt_rho * sigma.matrix()) * &sqrt_rho;
    let inner = (&inner + &inner.adjoint()).scale_real(0.5);
    let t = trace_sqrt_psd(&inner)?;
    Ok((t * t).clamp(0.0, 1.0))
}
