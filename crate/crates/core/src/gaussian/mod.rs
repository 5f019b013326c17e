//! Gaussian states of a handful of labelled bosonic modes.
//!
//! Conventions used everywhere in the crate:
//!
//! * ħ = 1, `[X, P] = i`, vacuum variance 1/2 (X = (a + a†)/√2).
//! * Phase-space vectors are ordered `(X₁, P₁, X₂, P₂, …)` following the
//!   order of [`GaussianState::modes`].
//! * A quadratic Hamiltonian `½ rᵀ H r` generates `r ↦ exp(Ω H t) r` where
//!   `Ω` is the block-diagonal `[[0, 1], [-1, 0]]` form.

mod expm;
mod homodyne;
mod state;
mod symplectic;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

pub use expm::{expm, nilpotent_exp};
pub use homodyne::{homodyne_condition, MeasuredMode, Outcome};
pub use state::{vacuum_state, GaussianState, StateRecord};
pub use symplectic::{hamiltonian_to_symplectic, SymplecticTransform, SYMPLECTIC_TOL};

/// Variance of each vacuum quadrature.
pub const VACUUM_VARIANCE: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Cosine sideband light mode.
    LightC,
    /// Sine sideband light mode.
    LightS,
    /// Symmetric combination of the two atomic classes.
    AtomPlus,
    /// Antisymmetric combination of the two atomic classes.
    AtomMinus,
    /// Atoms pumped into m = −F.
    Atom1,
    /// Atoms pumped into m = +F.
    Atom2,
    /// Cosine mode of an auxiliary meter pulse (readout).
    MeterC,
    /// Sine mode of an auxiliary meter pulse (readout).
    MeterS,
}

impl Mode {
    /// The atomic basis this label belongs to, `None` for light modes.
    pub fn basis(self) -> Option<AtomicBasis> {
        match self {
            Mode::AtomPlus | Mode::AtomMinus => Some(AtomicBasis::PlusMinus),
            Mode::Atom1 | Mode::Atom2 => Some(AtomicBasis::Classes),
            _ => None,
        }
    }

    pub fn is_atomic(self) -> bool {
        self.basis().is_some()
    }
}

/// Which pair of atomic modes a state is written in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AtomicBasis {
    /// `(AtomPlus, AtomMinus)`: X_{A±} = (X_{A1} ± X_{A2})/√2
    PlusMinus,
    /// `(Atom1, Atom2)`: the two pumped classes separately
    Classes,
}

impl AtomicBasis {
    pub fn pair(self) -> (Mode, Mode) {
        match self {
            AtomicBasis::PlusMinus => (Mode::AtomPlus, Mode::AtomMinus),
            AtomicBasis::Classes => (Mode::Atom1, Mode::Atom2),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quadrature {
    X,
    P,
}

impl Quadrature {
    #[inline]
    pub(crate) fn offset(self) -> usize {
        match self {
            Quadrature::X => 0,
            Quadrature::P => 1,
        }
    }
}

/// Canonical symplectic form for `n_modes` modes.
pub fn symplectic_form(n_modes: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for k in 0..n_modes {
        omega[(2 * k, 2 * k + 1)] = 1.0;
        omega[(2 * k + 1, 2 * k)] = -1.0;
    }
    omega
}

/// Single-mode rotation in the convention where θ = π/2 sends the P mean
/// into X and the X mean into −P.
pub fn rotation_block(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, s], [-s, c]]
}

/// Smallest eigenvalue of the Hermitian matrix `re + i·im`, computed through
/// its real symmetric embedding `[[re, −im], [im, re]]`.
pub(crate) fn min_eig_hermitian(re: &DMatrix<f64>, im: &DMatrix<f64>) -> f64 {
    let n = re.nrows();
    let mut big = DMatrix::zeros(2 * n, 2 * n);
    big.view_mut((0, 0), (n, n)).copy_from(re);
    big.view_mut((n, n), (n, n)).copy_from(re);
    big.view_mut((0, n), (n, n)).copy_from(&(-im));
    big.view_mut((n, 0), (n, n)).copy_from(im);
    SymmetricEigen::new(big).eigenvalues.min()
}

/// Complete-positivity test for the Gaussian channel V ↦ X V Xᵀ + Y:
/// Y + (i/2)(Ω − X Ω Xᵀ) must be positive semidefinite.
pub fn is_valid_channel(x: &DMatrix<f64>, y: &DMatrix<f64>, tol: f64) -> bool {
    let omega = symplectic_form(x.nrows() / 2);
    let im = (&omega - x * &omega * x.transpose()) * 0.5;
    let re = (y + y.transpose()) * 0.5;
    min_eig_hermitian(&re, &im) >= -tol
}
