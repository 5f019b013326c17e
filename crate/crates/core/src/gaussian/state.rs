use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{min_eig_hermitian, rotation_block, symplectic_form, AtomicBasis, Mode, Quadrature, SymplecticTransform, VACUUM_VARIANCE};
use crate::error::{Error, Result};

/// Mean vector and covariance matrix over an ordered list of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    basis: AtomicBasis,
    modes: Vec<Mode>,
    means: DVector<f64>,
    cov: DMatrix<f64>,
}

fn check_modes(modes: &[Mode], basis: AtomicBasis) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].contains(m) {
            return Err(Error::DuplicateMode(*m));
        }
        if let Some(b) = m.basis() {
            if b != basis {
                return Err(Error::ModeBasisConflict { mode: *m, basis });
            }
        }
    }
    Ok(())
}

/// Vacuum over the first `n_modes` of the canonical layout
/// `[LightC, LightS, atom+/1, atom−/2, MeterC, MeterS]`.
pub fn vacuum_state(n_modes: usize, basis: AtomicBasis) -> Result<GaussianState> {
    let (a, b) = basis.pair();
    let layout = [Mode::LightC, Mode::LightS, a, b, Mode::MeterC, Mode::MeterS];
    if n_modes == 0 || n_modes > layout.len() {
        return Err(Error::OutOfRange {
            name: "n_modes",
            value: n_modes as f64,
            range: "[1, 6]",
        });
    }
    GaussianState::vacuum(&layout[..n_modes], basis)
}

impl GaussianState {
    pub fn vacuum(modes: &[Mode], basis: AtomicBasis) -> Result<Self> {
        check_modes(modes, basis)?;
        let dim = 2 * modes.len();
        Ok(GaussianState {
            basis,
            modes: modes.to_vec(),
            means: DVector::zeros(dim),
            cov: DMatrix::identity(dim, dim) * VACUUM_VARIANCE,
        })
    }

    /// Builds a state from raw moments. The covariance is symmetrized.
    pub fn from_moments(
        modes: &[Mode],
        basis: AtomicBasis,
        means: DVector<f64>,
        cov: DMatrix<f64>,
    ) -> Result<Self> {
        check_modes(modes, basis)?;
        let dim = 2 * modes.len();
        if means.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: means.len(),
            });
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: cov.nrows(),
            });
        }
        let cov = (&cov + cov.transpose()) * 0.5;
        Ok(GaussianState {
            basis,
            modes: modes.to_vec(),
            means,
            cov,
        })
    }

    pub fn basis(&self) -> AtomicBasis {
        self.basis
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn n_modes(&self) -> usize {
        self.modes.len()
    }

    pub fn means(&self) -> &DVector<f64> {
        &self.means
    }

    pub fn cov(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn index_of(&self, mode: Mode) -> Result<usize> {
        self.modes
            .iter()
            .position(|&m| m == mode)
            .ok_or(Error::UnknownMode(mode))
    }

    /// Row of the given quadrature in the phase-space vector.
    pub fn quadrature_index(&self, mode: Mode, q: Quadrature) -> Result<usize> {
        Ok(2 * self.index_of(mode)? + q.offset())
    }

    pub fn mean_of(&self, mode: Mode, q: Quadrature) -> Result<f64> {
        Ok(self.means[self.quadrature_index(mode, q)?])
    }

    /// (X, P) means of one mode.
    pub fn mode_means(&self, mode: Mode) -> Result<[f64; 2]> {
        let i = 2 * self.index_of(mode)?;
        Ok([self.means[i], self.means[i + 1]])
    }

    /// 2×2 covariance block of one mode.
    pub fn mode_cov(&self, mode: Mode) -> Result<DMatrix<f64>> {
        let i = 2 * self.index_of(mode)?;
        Ok(self.cov.view((i, i), (2, 2)).into_owned())
    }

    pub fn require_basis(&self, basis: AtomicBasis) -> Result<()> {
        if self.basis == basis {
            Ok(())
        } else {
            Err(Error::WrongBasis {
                expected: basis,
                found: self.basis,
            })
        }
    }

    pub fn displace(&self, mode: Mode, dx: f64, dp: f64) -> Result<Self> {
        let i = 2 * self.index_of(mode)?;
        let mut out = self.clone();
        out.means[i] += dx;
        out.means[i + 1] += dp;
        Ok(out)
    }

    pub fn apply_symplectic(&self, s: &SymplecticTransform) -> Result<Self> {
        self.apply_linear(s.matrix())
    }

    /// means → M·means, cov → M·cov·Mᵀ for an arbitrary real matrix `m`.
    ///
    /// This is how classical feedback of an already-measured quadrature acts
    /// on the unconditional state; physical validity is the caller's job.
    pub fn apply_linear(&self, m: &DMatrix<f64>) -> Result<Self> {
        let dim = self.means.len();
        if m.nrows() != dim || m.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: m.nrows(),
            });
        }
        let cov = m * &self.cov * m.transpose();
        Ok(GaussianState {
            basis: self.basis,
            modes: self.modes.clone(),
            means: m * &self.means,
            cov: (&cov + cov.transpose()) * 0.5,
        })
    }

    /// Gaussian channel `means → X·means`, `cov → X·cov·Xᵀ + Y`.
    pub fn apply_channel(&self, x: &DMatrix<f64>, y: &DMatrix<f64>) -> Result<Self> {
        let mut out = self.apply_linear(x)?;
        if y.shape() != out.cov.shape() {
            return Err(Error::DimensionMismatch {
                expected: out.cov.nrows(),
                found: y.nrows(),
            });
        }
        out.cov += y;
        Ok(out)
    }

    /// Rotates one mode's (X, P) by `theta`; θ = π/2 takes P → X and X → −P.
    pub fn rotate_mode(&self, mode: Mode, theta: f64) -> Result<Self> {
        let i = 2 * self.index_of(mode)?;
        let r = rotation_block(theta);
        let mut m = DMatrix::identity(self.means.len(), self.means.len());
        m[(i, i)] = r[0][0];
        m[(i, i + 1)] = r[0][1];
        m[(i + 1, i)] = r[1][0];
        m[(i + 1, i + 1)] = r[1][1];
        self.apply_linear(&m)
    }

    /// Mixes `mode` with vacuum on a beam splitter of the given intensity
    /// transmission.
    pub fn beamsplitter_loss(&self, mode: Mode, transmission: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&transmission) {
            return Err(Error::OutOfRange {
                name: "transmission",
                value: transmission,
                range: "[0, 1]",
            });
        }
        let i = 2 * self.index_of(mode)?;
        let dim = self.means.len();
        let amp = transmission.sqrt();
        let mut x = DMatrix::identity(dim, dim);
        let mut y = DMatrix::zeros(dim, dim);
        for k in i..i + 2 {
            x[(k, k)] = amp;
            y[(k, k)] = (1.0 - transmission) * VACUUM_VARIANCE;
        }
        self.apply_channel(&x, &y)
    }

    /// Resets one mode to vacuum, discarding its correlations.
    pub fn reset_to_vacuum(&self, mode: Mode) -> Result<Self> {
        self.beamsplitter_loss(mode, 0.0)
    }

    /// Marginal state of the listed modes, in the listed order.
    pub fn reduce(&self, keep: &[Mode]) -> Result<Self> {
        let rows: Vec<usize> = keep
            .iter()
            .map(|&m| self.index_of(m).map(|i| [2 * i, 2 * i + 1]))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let means = DVector::from_iterator(rows.len(), rows.iter().map(|&r| self.means[r]));
        let cov = DMatrix::from_fn(rows.len(), rows.len(), |a, b| self.cov[(rows[a], rows[b])]);
        GaussianState::from_moments(keep, self.basis, means, cov)
    }

    /// Tensor product with a second state in the same atomic basis.
    pub fn append(&self, other: &GaussianState) -> Result<Self> {
        other.require_basis(self.basis)?;
        let mut modes = self.modes.clone();
        modes.extend_from_slice(&other.modes);
        let (n1, n2) = (self.means.len(), other.means.len());
        let mut means = DVector::zeros(n1 + n2);
        means.rows_mut(0, n1).copy_from(&self.means);
        means.rows_mut(n1, n2).copy_from(&other.means);
        let mut cov = DMatrix::zeros(n1 + n2, n1 + n2);
        cov.view_mut((0, 0), (n1, n1)).copy_from(&self.cov);
        cov.view_mut((n1, n1), (n2, n2)).copy_from(&other.cov);
        GaussianState::from_moments(&modes, self.basis, means, cov)
    }

    /// Appends vacuum modes.
    pub fn with_vacuum_modes(&self, extra: &[Mode]) -> Result<Self> {
        self.append(&GaussianState::vacuum(extra, self.basis)?)
    }

    /// Rewrites the atomic modes in `target` basis. The two bases are
    /// related by X_{A±} = (X_{A1} ± X_{A2})/√2 (same for P), a 50:50
    /// beam splitter that is its own inverse.
    pub fn to_basis(&self, target: AtomicBasis) -> Result<Self> {
        if target == self.basis {
            return Ok(self.clone());
        }
        let (from_a, from_b) = self.basis.pair();
        let (to_a, to_b) = target.pair();
        let ia = self.index_of(from_a)?;
        let ib = self.index_of(from_b)?;
        let dim = self.means.len();
        let mut m = DMatrix::identity(dim, dim);
        for q in 0..2 {
            let (ra, rb) = (2 * ia + q, 2 * ib + q);
            m[(ra, ra)] = FRAC_1_SQRT_2;
            m[(ra, rb)] = FRAC_1_SQRT_2;
            m[(rb, ra)] = FRAC_1_SQRT_2;
            m[(rb, rb)] = -FRAC_1_SQRT_2;
        }
        let mut out = self.apply_linear(&m)?;
        out.basis = target;
        out.modes[ia] = to_a;
        out.modes[ib] = to_b;
        Ok(out)
    }

    /// Largest asymmetry |V_ij − V_ji|.
    pub fn asymmetry(&self) -> f64 {
        (&self.cov - self.cov.transpose()).amax()
    }

    /// Smallest eigenvalue of the real embedding of V + (i/2)Ω; the
    /// uncertainty relation holds iff it is nonnegative.
    pub fn uncertainty_margin(&self) -> f64 {
        let half_omega = symplectic_form(self.modes.len()) * 0.5;
        min_eig_hermitian(&self.cov, &half_omega)
    }

    pub fn satisfies_uncertainty(&self, tol: f64) -> bool {
        self.uncertainty_margin() >= -tol
    }

    pub fn to_record(&self) -> StateRecord {
        StateRecord {
            basis: self.basis,
            modes: self.modes.clone(),
            means: self.means.iter().copied().collect(),
            cov: self.cov.transpose().iter().copied().collect(),
        }
    }

    pub fn from_record(rec: &StateRecord) -> Result<Self> {
        let dim = 2 * rec.modes.len();
        if rec.cov.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: rec.cov.len(),
            });
        }
        GaussianState::from_moments(
            &rec.modes,
            rec.basis,
            DVector::from_column_slice(&rec.means),
            DMatrix::from_row_slice(dim, dim, &rec.cov),
        )
    }
}

/// Serialized form of a state: means plus row-major covariance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateRecord {
    pub basis: AtomicBasis,
    pub modes: Vec<Mode>,
    pub means: Vec<f64>,
    pub cov: Vec<f64>,
}
