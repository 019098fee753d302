use std::fmt;
use std::str::FromStr;

use super::density::{DensityMatrix, HilbertSpec};
use super::matrix::{sigma_x, sigma_z, ComplexMatrix, C64, ZERO};
use crate::error::{check_range, Error, Result};

/// The four Bell states, indexed as in the measurement table
/// (`psi+ = 0`, `psi- = 1`, `phi+ = 2`, `phi- = 3`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellKind {
    PsiPlus,
    PsiMinus,
    PhiPlus,
    PhiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [BellKind::PsiPlus, BellKind::PsiMinus, BellKind::PhiPlus, BellKind::PhiMinus];

    pub fn index(self) -> usize {
        match self {
            BellKind::PsiPlus => 0,
            BellKind::PsiMinus => 1,
            BellKind::PhiPlus => 2,
            BellKind::PhiMinus => 3,
        }
    }

    pub fn from_index(j: usize) -> Option<Self> {
        Self::ALL.get(j).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
        }
    }

    /// State vector in the `|00>, |01>, |10>, |11>` basis.
    pub fn vector(self) -> [C64; 4] {
        let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        match self {
            BellKind::PsiPlus => [ZERO, s, s, ZERO],
            BellKind::PsiMinus => [ZERO, s, -s, ZERO],
            BellKind::PhiPlus => [s, ZERO, ZERO, s],
            BellKind::PhiMinus => [s, ZERO, ZERO, -s],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector())
    }

    /// Feed-forward Pauli correction that rotates this outcome into the
    /// singlet when applied to the second qubit of the pair.
    pub fn correction(self) -> ComplexMatrix {
        match self {
            BellKind::PsiPlus => sigma_z(),
            BellKind::PsiMinus => ComplexMatrix::identity(2),
            BellKind::PhiPlus => &sigma_z() * &sigma_x(),
            BellKind::PhiMinus => sigma_x(),
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BellKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "psi+" | "psi_plus" => Ok(BellKind::PsiPlus),
            "psi-" | "psi_minus" | "singlet" => Ok(BellKind::PsiMinus),
            "phi+" | "phi_plus" => Ok(BellKind::PhiPlus),
            "phi-" | "phi_minus" => Ok(BellKind::PhiMinus),
            other => Err(format!("unknown Bell state `{other}`")),
        }
    }
}

/// Bell state on qubits labelled `a` and `b`.
pub fn bell_state(kind: BellKind) -> DensityMatrix {
    bell_state_on(kind, "a", "b").expect("distinct labels")
}

pub fn bell_state_on(kind: BellKind, first: &str, second: &str) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(HilbertSpec::qubits(&[first, second])?, &kind.vector())
}

/// `p |psi-><psi-| + (1 - p) I/4` on qubits `a`, `b`.
pub fn werner_state(p: f64) -> Result<DensityMatrix> {
    werner_state_on(p, "a", "b")
}

pub fn werner_state_on(p: f64, first: &str, second: &str) -> Result<DensityMatrix> {
    check_range("Werner purity", p, 0.0, 1.0, "[0, 1]")?;
    let space = HilbertSpec::qubits(&[first, second])?;
    let m = &BellKind::PsiMinus.projector().scale_real(p) + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
    DensityMatrix::new(space, m)
}

/// Werner parameter of a two-qubit state, read off its singlet weight:
/// `p = (4 <psi-|rho|psi-> - 1) / 3`.
pub fn werner_parameter(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::Shape(format!("Werner parameter needs a 4x4 state, got {}", rho.dim())));
    }
    let f = rho.overlap_with_pure(&BellKind::PsiMinus.vector())?;
    Ok((4.0 * f - 1.0) / 3.0)
}
