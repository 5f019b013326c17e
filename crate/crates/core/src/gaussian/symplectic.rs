use nalgebra::DMatrix;

use super::{expm, symplectic_form};
use crate::error::{Error, Result};

/// Tolerance on ‖S Ω Sᵀ − Ω‖_F accepted for a symplectic matrix.
pub const SYMPLECTIC_TOL: f64 = 1e-10;

/// A linear phase-space map that preserves the canonical commutators.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: DMatrix<f64>,
}

fn residual(s: &DMatrix<f64>) -> f64 {
    let omega = symplectic_form(s.nrows() / 2);
    (s * &omega * s.transpose() - omega).norm()
}

impl SymplecticTransform {
    /// Wraps `matrix` after checking `S Ω Sᵀ = Ω` to [`SYMPLECTIC_TOL`].
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() % 2 != 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (matrix.nrows() / 2).max(1),
                found: matrix.ncols(),
            });
        }
        let r = residual(&matrix);
        if !(r <= SYMPLECTIC_TOL) {
            return Err(Error::NotSymplectic(r));
        }
        Ok(SymplecticTransform { matrix })
    }

    pub fn identity(n_modes: usize) -> Self {
        SymplecticTransform {
            matrix: DMatrix::identity(2 * n_modes, 2 * n_modes),
        }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.matrix.nrows() / 2
    }

    /// ‖S Ω Sᵀ − Ω‖_F
    pub fn symplectic_residual(&self) -> f64 {
        residual(&self.matrix)
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &SymplecticTransform) -> Result<Self> {
        if next.matrix.nrows() != self.matrix.nrows() {
            return Err(Error::DimensionMismatch {
                expected: self.matrix.nrows(),
                found: next.matrix.nrows(),
            });
        }
        Ok(SymplecticTransform {
            matrix: &next.matrix * &self.matrix,
        })
    }

    /// S⁻¹ = −Ω Sᵀ Ω
    pub fn inverse(&self) -> Self {
        let omega = symplectic_form(self.n_modes());
        SymplecticTransform {
            matrix: -(&omega * self.matrix.transpose() * &omega),
        }
    }
}

/// Evolution `exp(Ω H t)` generated by the quadratic Hamiltonian `½ rᵀ H r`.
pub fn hamiltonian_to_symplectic(h: &DMatrix<f64>, t: f64) -> Result<SymplecticTransform> {
    if !h.is_square() || h.nrows() % 2 != 0 {
        return Err(Error::DimensionMismatch {
            expected: h.nrows() + h.nrows() % 2,
            found: h.ncols(),
        });
    }
    let asym = (h - h.transpose()).amax();
    let scale = h.amax().max(1.0);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let generator = symplectic_form(h.nrows() / 2) * h * t;
    SymplecticTransform::new(expm(&generator))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_hamiltonian_is_identity() {
        let s = hamiltonian_to_symplectic(&DMatrix::zeros(8, 8), 1.3).unwrap();
        assert_eq!(s, SymplecticTransform::identity(4));
    }

    #[test]
    fn oscillator_quarter_period() {
        let s = hamiltonian_to_symplectic(&DMatrix::identity(2, 2), FRAC_PI_2).unwrap();
        let m = s.matrix();
        assert_relative_eq!(m[(0, 0)], 0.0, epsilon = 1e-15);
        assert_relative_eq!(m[(0, 1)], 1.0, epsilon = 1e-15);
        assert_relative_eq!(m[(1, 0)], -1.0, epsilon = 1e-15);
        assert_relative_eq!(m[(1, 1)], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rejects_asymmetric_form() {
        let mut h = DMatrix::zeros(2, 2);
        h[(0, 1)] = 1.0;
        assert!(matches!(hamiltonian_to_symplectic(&h, 1.0), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn rejects_non_symplectic_matrix() {
        let m = DMatrix::from_diagonal_element(2, 2, 2.0);
        assert!(matches!(SymplecticTransform::new(m), Err(Error::NotSymplectic(_))));
    }

    #[test]
    fn inverse_round_trip() {
        let mut h = DMatrix::zeros(4, 4);
        h[(0, 2)] = 0.4;
        h[(2, 0)] = 0.4;
        h[(1, 1)] = 1.0;
        h[(3, 3)] = -0.3;
        let s = hamiltonian_to_symplectic(&h, 2.1).unwrap();
        let id = s.then(&s.inverse()).unwrap();
        assert!((id.matrix() - DMatrix::<f64>::identity(4, 4)).amax() < 1e-12);
    }
}
