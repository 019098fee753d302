//! Dense complex matrices and the small operator zoo used throughout the
//! simulator (ladder operators, Pauli matrices, embeddings).

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Default entrywise tolerance for matrix comparisons.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Tolerance used to decide whether a matrix is Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Eigenvalues in `[-PSD_CLAMP, 0)` are treated as numerical zeros.
pub const PSD_CLAMP: f64 = 1e-9;

/// A dense complex matrix.
///
/// Construction takes entries in row-major order; storage is delegated to
/// `nalgebra`.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    /// Builds a matrix from real row-major entries.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        Self::new(rows, cols, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { C64::new(diag[r], 0.0) } else { ZERO })
    }

    /// Projector `|v><v|` onto a (not necessarily normalised) column vector.
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |r, c| v[r] * v[c].conj())
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, r: usize, c: usize) -> C64 {
        self.0[(r, c)]
    }

    pub fn set(&mut self, r: usize, c: usize, value: C64) {
        self.0[(r, c)] = value;
    }

    /// Entries in row-major order.
    pub fn entries(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for r in 0..self.rows() {
            for c in 0..self.cols() {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<C64> {
        self.0
    }

    pub fn from_nalgebra(m: DMatrix<C64>) -> Self {
        Self(m)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                other.rows(),
                other.cols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Result<Vec<C64>> {
        if self.cols() != v.len() {
            return Err(Error::Shape(format!(
                "cannot apply {}x{} matrix to vector of length {}",
                self.rows(),
                self.cols(),
                v.len()
            )));
        }
        Ok((0..self.rows()).map(|r| (0..self.cols()).map(|c| self.0[(r, c)] * v[c]).sum()).collect())
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|z| z.conj()))
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows().min(self.cols())).map(|i| self.0[(i, i)]).collect()
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        Ok(self.matmul(other)? - other.matmul(self)?)
    }

    /// `AB + BA`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        Ok(self.matmul(other)? + other.matmul(self)?)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise distance to `other`; `inf` when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.0.shape() != other.0.shape() {
            return f64::INFINITY;
        }
        self.0.iter().zip(other.0.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.max_abs_diff(other) <= tol
    }

    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.is_square() && (&self.adjoint() * self).approx_eq(&Self::identity(self.rows()), tol)
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for r in 0..self.rows() {
            write!(f, "  ")?;
            for c in 0..self.cols() {
                let z = self.0[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl Add for ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> Self {
        Self(self.0 + rhs.0)
    }
}

impl Add<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> Self {
        Self(self.0 - rhs.0)
    }
}

impl Sub<&ComplexMatrix> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Neg for ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> Self {
        Self(-self.0)
    }
}

/// Panics on shape mismatch; use [`ComplexMatrix::matmul`] for a fallible
/// product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

impl Mul<C64> for ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: C64) -> ComplexMatrix {
        self.scale(rhs)
    }
}

pub fn sigma_x() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| if r != c { ONE } else { ZERO })
}

pub fn sigma_y() -> ComplexMatrix {
    ComplexMatrix::from_fn(2, 2, |r, c| match (r, c) {
        (0, 1) => -I,
        (1, 0) => I,
        _ => ZERO,
    })
}

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::from_diag(&[1.0, -1.0])
}

/// Truncated bosonic annihilation operator on `dim` Fock levels.
pub fn annihilation(dim: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(dim, dim, |r, c| if c == r + 1 { C64::new((c as f64).sqrt(), 0.0) } else { ZERO })
}

/// Truncated number operator `a^dagger a`.
pub fn number(dim: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..dim).map(|n| n as f64).collect();
    ComplexMatrix::from_diag(&diag)
}

/// Embeds a single-subsystem operator at `position` of a tensor product with
/// the given subsystem dimensions.
pub fn embed(op: &ComplexMatrix, position: usize, dims: &[usize]) -> Result<ComplexMatrix> {
    if position >= dims.len() || op.rows() != dims[position] || !op.is_square() {
        return Err(Error::Shape(format!(
            "cannot embed {}x{} operator at slot {position} of {dims:?}",
            op.rows(),
            op.cols()
        )));
    }
    let mut out = ComplexMatrix::identity(1);
    for (i, &d) in dims.iter().enumerate() {
        let factor = if i == position { op.clone() } else { ComplexMatrix::identity(d) };
        out = out.kron(&factor);
    }
    Ok(out)
}

/// Computational basis vector `|index>` in dimension `dim`.
pub fn basis_vector(dim: usize, index: usize) -> Vec<C64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_identities() {
        let i4 = ComplexMatrix::identity(2).kron(&ComplexMatrix::identity(2));
        assert_eq!(i4, ComplexMatrix::identity(4));
        let zz = sigma_z().kron(&sigma_z());
        assert_eq!(zz, ComplexMatrix::from_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_sigma_x_sigma_y_is_antidiagonal() {
        // sigma_x (x) sigma_y = [[0, Y], [Y, 0]] with Y = [[0, -i], [i, 0]].
        let m = sigma_x().kron(&sigma_y());
        let expected = ComplexMatrix::new(
            4,
            4,
            vec![
                ZERO, ZERO, ZERO, -I, //
                ZERO, ZERO, I, ZERO, //
                ZERO, -I, ZERO, ZERO, //
                I, ZERO, ZERO, ZERO,
            ],
        )
        .unwrap();
        assert_eq!(m, expected);
        // reading the antidiagonal bottom-left to top-right
        let anti: Vec<C64> = (0..4).map(|r| m.get(3 - r, r)).collect();
        assert_eq!(anti, vec![I, -I, I, -I]);
    }

    #[test]
    fn entries_are_row_major() {
        let m = ComplexMatrix::from_real(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]).unwrap();
        assert_eq!(m.get(0, 2), C64::new(3.0, 0.0));
        assert_eq!(m.get(1, 0), C64::new(4.0, 0.0));
        assert_eq!(m.entries()[4], C64::new(5.0, 0.0));
        assert!(ComplexMatrix::new(2, 2, vec![ZERO; 3]).is_err());
    }

    #[test]
    fn ladder_operators() {
        let a = annihilation(3);
        let n = &a.adjoint() * &a;
        assert!(n.approx_eq(&number(3), 1e-15));
        let one = basis_vector(2, 1);
        assert_eq!(annihilation(2).apply(&one).unwrap(), basis_vector(2, 0));
    }

    #[test]
    fn embed_checks_shapes() {
        assert!(embed(&sigma_x(), 2, &[2, 2]).is_err());
        assert!(embed(&sigma_x(), 0, &[3, 2]).is_err());
        let e = embed(&sigma_z(), 1, &[2, 2]).unwrap();
        assert_eq!(e, ComplexMatrix::from_diag(&[1.0, -1.0, 1.0, -1.0]));
    }

    #[test]
    fn matmul_rejects_bad_shapes() {
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Shape(_))));
    }
}
