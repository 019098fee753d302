//! Labelled tensor-product spaces and validated density matrices.

use std::collections::HashSet;
use std::fmt;

use super::eig::hermitian_eigenvalues;
use super::matrix::{embed, ComplexMatrix, C64, HERMITIAN_TOL, PSD_CLAMP, ZERO};
use crate::error::{check_range, Error, Result};

/// Allowed deviation of the trace from one.
pub const TRACE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered list of labelled subsystems. The first subsystem is the most
/// significant digit of the basis index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSpec {
    subsystems: Vec<Subsystem>,
}

impl HilbertSpec {
    pub fn new<S: Into<String>>(subsystems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let subsystems: Vec<Subsystem> =
            subsystems.into_iter().map(|(label, dim)| Subsystem { label: label.into(), dim }).collect();
        if subsystems.is_empty() {
            return Err(Error::Shape("a Hilbert space needs at least one subsystem".into()));
        }
        let mut seen = HashSet::new();
        for s in &subsystems {
            if s.dim < 2 {
                return Err(Error::Shape(format!("subsystem `{}` has dimension {}, need at least 2", s.label, s.dim)));
            }
            if !seen.insert(s.label.as_str()) {
                return Err(Error::DuplicateSubsystem(s.label.clone()));
            }
        }
        Ok(Self { subsystems })
    }

    /// `n` qubits with the given labels.
    pub fn qubits(labels: &[&str]) -> Result<Self> {
        Self::new(labels.iter().map(|&l| (l, 2)))
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn labels(&self) -> Vec<&str> {
        self.subsystems.iter().map(|s| s.label.as_str()).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn position(&self, label: &str) -> Result<usize> {
        self.subsystems.iter().position(|s| s.label == label).ok_or_else(|| Error::UnknownSubsystem(label.to_string()))
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.position(label)?].dim)
    }

    /// Concatenation `self (x) other`; labels must stay unique.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        Self::new(self.subsystems.iter().chain(other.subsystems.iter()).map(|s| (s.label.clone(), s.dim)))
    }

    /// Mixed-radix digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.len()];
        for (slot, s) in out.iter_mut().zip(&self.subsystems).rev() {
            *slot = index % s.dim;
            index /= s.dim;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits.iter().zip(&self.subsystems).fold(0, |acc, (&d, s)| acc * s.dim + d)
    }

    /// Basis label such as `01` (digits concatenated, most significant first).
    pub fn basis_label(&self, index: usize) -> String {
        self.digits(index).iter().map(|d| d.to_string()).collect()
    }
}

/// A trace-one, Hermitian, positive-semidefinite operator on a labelled space.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    space: HilbertSpec,
    matrix: ComplexMatrix,
}

/// Numerical health of a candidate density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDiagnostics {
    pub hermiticity_defect: f64,
    pub trace_error: f64,
    pub min_eigenvalue: f64,
}

impl DensityMatrix {
    pub fn new(space: HilbertSpec, matrix: ComplexMatrix) -> Result<Self> {
        let d = Self::diagnose(&space, &matrix)?;
        if d.hermiticity_defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {:e})", d.hermiticity_defect)));
        }
        if d.trace_error > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace off by {:e}", d.trace_error)));
        }
        if d.min_eigenvalue < -PSD_CLAMP {
            return Err(Error::InvalidState(format!("negative eigenvalue {:e}", d.min_eigenvalue)));
        }
        Ok(Self { space, matrix })
    }

    /// Checks shape and reports the invariants without enforcing them.
    pub fn diagnose(space: &HilbertSpec, matrix: &ComplexMatrix) -> Result<StateDiagnostics> {
        let n = space.total_dim();
        if matrix.rows() != n || matrix.cols() != n {
            return Err(Error::Shape(format!(
                "space of dimension {n} needs a {n}x{n} matrix, got {}x{}",
                matrix.rows(),
                matrix.cols()
            )));
        }
        let hermiticity_defect = matrix.hermiticity_defect();
        let tr = matrix.trace();
        let trace_error = (tr - C64::new(1.0, 0.0)).norm();
        let herm = (matrix + &matrix.adjoint()).scale_real(0.5);
        let min_eigenvalue = hermitian_eigenvalues(&herm)?.last().copied().unwrap_or(0.0);
        Ok(StateDiagnostics { hermiticity_defect, trace_error, min_eigenvalue })
    }

    /// Pure state `|psi><psi|`; `psi` is normalised first.
    pub fn from_pure(space: HilbertSpec, psi: &[C64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("zero state vector".into()));
        }
        let psi: Vec<C64> = psi.iter().map(|z| z / norm).collect();
        if psi.len() != space.total_dim() {
            return Err(Error::Shape(format!(
                "state vector of length {} for a space of dimension {}",
                psi.len(),
                space.total_dim()
            )));
        }
        Self::new(space, ComplexMatrix::outer(&psi))
    }

    /// Computational basis state given one digit per subsystem.
    pub fn basis_state(space: HilbertSpec, digits: &[usize]) -> Result<Self> {
        if digits.len() != space.len() || digits.iter().zip(space.dims()).any(|(&d, n)| d >= n) {
            return Err(Error::Shape(format!("digits {digits:?} do not fit {:?}", space.dims())));
        }
        let mut psi = vec![ZERO; space.total_dim()];
        psi[space.index(digits)] = C64::new(1.0, 0.0);
        Self::from_pure(space, &psi)
    }

    pub fn maximally_mixed(space: HilbertSpec) -> Self {
        let n = space.total_dim();
        let matrix = ComplexMatrix::identity(n).scale_real(1.0 / n as f64);
        Self { space, matrix }
    }

    pub fn space(&self) -> &HilbertSpec {
        &self.space
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn diagnostics(&self) -> StateDiagnostics {
        Self::diagnose(&self.space, &self.matrix).expect("validated at construction")
    }

    /// Diagonal of the matrix in the computational basis.
    pub fn populations(&self) -> Vec<f64> {
        self.matrix.diagonal().iter().map(|z| z.re).collect()
    }

    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `tr(rho O)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> Result<C64> {
        Ok(self.matrix.matmul(op)?.trace())
    }

    /// `<psi| rho |psi>` for a normalised vector.
    pub fn overlap_with_pure(&self, psi: &[C64]) -> Result<f64> {
        let v = self.matrix.apply(psi)?;
        Ok(psi.iter().zip(&v).map(|(a, b)| a.conj() * b).sum::<C64>().re)
    }

    pub fn tensor(&self, other: &Self) -> Result<Self> {
        Ok(Self { space: self.space.concat(&other.space)?, matrix: self.matrix.kron(&other.matrix) })
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.matmul(&self.matrix)?.matmul(&u.adjoint())?;
        Self::new(self.space.clone(), m)
    }

    /// Applies a single-subsystem unitary to the labelled subsystem.
    pub fn apply_local(&self, label: &str, u: &ComplexMatrix) -> Result<Self> {
        let pos = self.space.position(label)?;
        let full = embed(u, pos, &self.space.dims())?;
        self.conjugate_by(&full)
    }

    /// Convex mixture `w * self + (1 - w) * other` on the same space.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        check_range("mixing weight", w, 0.0, 1.0, "[0, 1]")?;
        if self.space != other.space {
            return Err(Error::Shape("cannot mix states on different spaces".into()));
        }
        let m = &self.matrix.scale_real(w) + &other.matrix.scale_real(1.0 - w);
        Self::new(self.space.clone(), m)
    }

    pub fn relabel(&self, labels: &[&str]) -> Result<Self> {
        if labels.len() != self.space.len() {
            return Err(Error::Shape(format!("{} labels for {} subsystems", labels.len(), self.space.len())));
        }
        let space = HilbertSpec::new(labels.iter().zip(self.space.dims()).map(|(&l, d)| (l, d)))?;
        Ok(Self { space, matrix: self.matrix.clone() })
    }

    /// Reorders subsystems so that they appear in `order` (a permutation of
    /// the current labels).
    pub fn permute(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.space.len() {
            return Err(Error::Shape(format!(
                "permutation lists {} labels, space has {}",
                order.len(),
                self.space.len()
            )));
        }
        let positions = order.iter().map(|l| self.space.position(l)).collect::<Result<Vec<_>>>()?;
        let new_space =
            HilbertSpec::new(order.iter().zip(&positions).map(|(&l, &p)| (l, self.space.subsystems()[p].dim)))?;
        let n = self.dim();
        // old index for every new index
        let map: Vec<usize> = (0..n)
            .map(|new_idx| {
                let new_digits = new_space.digits(new_idx);
                let mut old_digits = vec![0; positions.len()];
                for (k, &p) in positions.iter().enumerate() {
                    old_digits[p] = new_digits[k];
                }
                self.space.index(&old_digits)
            })
            .collect();
        let m = ComplexMatrix::from_fn(n, n, |r, c| self.matrix.get(map[r], map[c]));
        Ok(Self { space: new_space, matrix: m })
    }

    /// Reduced state on the subsystems named in `keep`, which stay in their
    /// original relative order.
    pub fn partial_trace(&self, keep: &[&str]) -> Result<Self> {
        let mut keep_pos = keep.iter().map(|l| self.space.position(l)).collect::<Result<Vec<_>>>()?;
        if keep_pos.is_empty() {
            return Err(Error::Shape("partial trace must keep at least one subsystem".into()));
        }
        keep_pos.sort_unstable();
        keep_pos.dedup();
        let subs = self.space.subsystems();
        let kept = HilbertSpec::new(keep_pos.iter().map(|&p| (subs[p].label.clone(), subs[p].dim)))?;
        let traced_pos: Vec<usize> = (0..subs.len()).filter(|p| !keep_pos.contains(p)).collect();
        let traced_dim: usize = traced_pos.iter().map(|&p| subs[p].dim).product();
        let traced_dims: Vec<usize> = traced_pos.iter().map(|&p| subs[p].dim).collect();

        let full_index = |kept_digits: &[usize], traced_idx: usize| {
            let mut digits = vec![0; subs.len()];
            for (k, &p) in keep_pos.iter().enumerate() {
                digits[p] = kept_digits[k];
            }
            let mut t = traced_idx;
            for (k, &p) in traced_pos.iter().enumerate().rev() {
                digits[p] = t % traced_dims[k];
                t /= traced_dims[k];
            }
            self.space.index(&digits)
        };

        let n = kept.total_dim();
        let m = ComplexMatrix::from_fn(n, n, |r, c| {
            let rd = kept.digits(r);
            let cd = kept.digits(c);
            (0..traced_dim).fold(ZERO, |acc, t| acc + self.matrix.get(full_index(&rd, t), full_index(&cd, t)))
        });
        Ok(Self { space: kept, matrix: m })
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityMatrix").field("space", &self.space.labels()).field("matrix", &self.matrix).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::bell::{bell_state, werner_state, BellKind};

    fn ghz3() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut psi = vec![ZERO; 8];
        psi[0] = C64::new(s, 0.0);
        psi[7] = C64::new(s, 0.0);
        DensityMatrix::from_pure(HilbertSpec::qubits(&["q1", "q2", "q3"]).unwrap(), &psi).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(matches!(HilbertSpec::qubits(&["a", "a"]), Err(Error::DuplicateSubsystem(_))));
        assert!(HilbertSpec::new([("a", 1usize)]).is_err());
        let s = HilbertSpec::new([("m", 2usize), ("c", 3)]).unwrap();
        assert_eq!(s.total_dim(), 6);
        assert_eq!(s.digits(5), vec![1, 2]);
        assert_eq!(s.index(&[1, 2]), 5);
        assert_eq!(s.basis_label(4), "11");
    }

    #[test]
    fn rejects_invalid_matrices() {
        let space = HilbertSpec::qubits(&["a"]).unwrap();
        let not_unit_trace = ComplexMatrix::from_diag(&[1.0, 1.0]);
        assert!(DensityMatrix::new(space.clone(), not_unit_trace).is_err());
        let negative = ComplexMatrix::from_diag(&[1.5, -0.5]);
        assert!(DensityMatrix::new(space.clone(), negative).is_err());
        let non_herm = ComplexMatrix::from_real(2, 2, &[0.5, 0.1, 0.0, 0.5]).unwrap();
        assert!(DensityMatrix::new(space.clone(), non_herm).is_err());
        let wrong_dim = ComplexMatrix::identity(4).scale_real(0.25);
        assert!(matches!(DensityMatrix::new(space, wrong_dim), Err(Error::Shape(_))));
    }

    #[test]
    fn singlet_marginal_is_maximally_mixed() {
        let rho = bell_state(BellKind::PsiMinus);
        let a = rho.partial_trace(&["a"]).unwrap();
        assert!(a.matrix().approx_eq(&ComplexMatrix::identity(2).scale_real(0.5), 1e-12));
    }

    #[test]
    fn product_state_marginal() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus =
            DensityMatrix::from_pure(HilbertSpec::qubits(&["A"]).unwrap(), &[C64::new(s, 0.0), C64::new(0.0, s)])
                .unwrap();
        let one = DensityMatrix::basis_state(HilbertSpec::qubits(&["B"]).unwrap(), &[1]).unwrap();
        let joint = plus.tensor(&one).unwrap();
        let back = joint.partial_trace(&["A"]).unwrap();
        assert!(back.matrix().approx_eq(plus.matrix(), 1e-12));
        let back = joint.partial_trace(&["B"]).unwrap();
        assert!(back.matrix().approx_eq(one.matrix(), 1e-12));
    }

    #[test]
    fn ghz_marginal_on_outer_qubits() {
        let r = ghz3().partial_trace(&["q1", "q3"]).unwrap();
        let expected = ComplexMatrix::from_diag(&[0.5, 0.0, 0.0, 0.5]);
        assert!(r.matrix().approx_eq(&expected, 1e-12));
        assert_eq!(r.space().labels(), vec!["q1", "q3"]);
    }

    #[test]
    fn partial_trace_keeps_original_order_and_rejects_unknown_labels() {
        let rho = werner_state(0.5).unwrap();
        let r = rho.partial_trace(&["b", "a"]).unwrap();
        assert_eq!(r.space().labels(), vec!["a", "b"]);
        assert!(matches!(
            rho.partial_trace(&["zz"]),
            Err(Error::UnknownSubsystem(l)) if l == "zz"
        ));
    }

    #[test]
    fn permute_moves_digits() {
        let s = HilbertSpec::qubits(&["x", "y", "z"]).unwrap();
        let rho = DensityMatrix::basis_state(s, &[1, 0, 0]).unwrap();
        let p = rho.permute(&["y", "z", "x"]).unwrap();
        assert_eq!(p.space().labels(), vec!["y", "z", "x"]);
        assert_eq!(p.populations()[1], 1.0);
    }
}
