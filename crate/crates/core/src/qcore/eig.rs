use nalgebra::SymmetricEigen;

use super::matrix::{ComplexMatrix, HERMITIAN_TOL, PSD_CLAMP, ZERO};
use crate::error::{Error, Result};

/// Spectral decomposition `M = V diag(values) V^dagger` of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// Rebuilds `V f(diag) V^dagger`.
    pub fn reconstruct_with(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.values.len();
        let v = &self.vectors;
        let weights: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(n, n, |r, c| {
            (0..n).fold(ZERO, |acc, k| acc + v.get(r, k) * v.get(c, k).conj() * weights[k])
        })
    }
}

pub fn hermitian_eig(m: &ComplexMatrix) -> Result<HermitianEigen> {
    if !m.is_square() {
        return Err(Error::Shape(format!("eigendecomposition needs a square matrix, got {}x{}", m.rows(), m.cols())));
    }
    let deviation = m.hermiticity_defect();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    // Symmetrise so the solver sees an exactly Hermitian input.
    let herm = (m + &m.adjoint()).scale_real(0.5);
    let eig = SymmetricEigen::new(herm.into_nalgebra());
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

/// Eigenvalues of a Hermitian matrix, descending.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eig(m)?.values)
}

/// Principal square root of a positive-semidefinite matrix.
///
/// Eigenvalues in `[-1e-9, 0)` are clamped to zero; anything more negative
/// is rejected.
pub fn matrix_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(m)?;
    if let Some(&min) = eig.values.last() {
        if min < -PSD_CLAMP {
            return Err(Error::PsdViolation { eigenvalue: min });
        }
    }
    Ok(eig.reconstruct_with(|x| x.max(0.0).sqrt()))
}

/// `sum_k sqrt(max(lambda_k, 0))` for a Hermitian PSD matrix, i.e. `tr sqrt(M)`.
pub(crate) fn trace_sqrt_psd(m: &ComplexMatrix) -> Result<f64> {
    let values = hermitian_eigenvalues(m)?;
    Ok(values.iter().map(|&x| x.max(0.0).sqrt()).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::{sigma_x, sigma_z, C64, ONE};

    #[test]
    fn pauli_spectra() {
        let e = hermitian_eig(&sigma_z()).unwrap();
        assert_eq!(e.values, vec![1.0, -1.0]);

        let e = hermitian_eig(&sigma_x()).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-12);
        assert!((e.values[1] + 1.0).abs() < 1e-12);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        // |+> up to a global phase
        let v0 = [e.vectors.get(0, 0), e.vectors.get(1, 0)];
        let overlap = (v0[0] * s + v0[1] * s).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
        let v1 = [e.vectors.get(0, 1), e.vectors.get(1, 1)];
        let overlap = (v1[0] * s - v1[1] * s).norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_and_unitarity() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                C64::new(2.0, 0.0),
                C64::new(0.5, 0.3),
                C64::new(0.0, -1.0),
                C64::new(0.5, -0.3),
                C64::new(-1.0, 0.0),
                C64::new(0.2, 0.0),
                C64::new(0.0, 1.0),
                C64::new(0.2, 0.0),
                ONE,
            ],
        )
        .unwrap();
        let e = hermitian_eig(&m).unwrap();
        assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
        assert!(e.vectors.is_unitary(1e-8));
        let back = e.reconstruct_with(|x| x);
        assert!((&back - &m).frobenius_norm() < 1e-8);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_of_simple_matrices() {
        let id = ComplexMatrix::identity(3);
        assert!(matrix_sqrt_psd(&id).unwrap().approx_eq(&id, 1e-12));
        let d = ComplexMatrix::from_diag(&[4.0, 9.0]);
        let r = matrix_sqrt_psd(&d).unwrap();
        assert!(r.approx_eq(&ComplexMatrix::from_diag(&[2.0, 3.0]), 1e-12));
    }

    #[test]
    fn sqrt_of_pure_projector_is_itself() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi = vec![C64::new(s, 0.0), C64::new(0.0, -s)];
        let p = ComplexMatrix::outer(&psi);
        let r = matrix_sqrt_psd(&p).unwrap();
        assert!(r.approx_eq(&p, 1e-10));
        assert!(((&r * &r) - p).frobenius_norm() < 1e-8);
    }

    #[test]
    fn sqrt_clamps_tiny_negatives_and_rejects_large_ones() {
        let tiny = ComplexMatrix::from_diag(&[1.0, -5e-10]);
        let r = matrix_sqrt_psd(&tiny).unwrap();
        assert_eq!(r.get(1, 1), ZERO);
        let bad = ComplexMatrix::from_diag(&[1.0, -1e-6]);
        assert!(matches!(matrix_sqrt_psd(&bad), Err(Error::PsdViolation { .. })));
    }
}
