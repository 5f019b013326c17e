//! Write and read by one QND pass, homodyne detection and feedback.
//!
//! Write: the signal light crosses the cell, X_C and P_S are measured and
//! fed back onto X_{A+} and P_{A−}. Read: a fresh pulse crosses the cell,
//! the atoms are turned by π/2 per mode, a meter pulse crosses again, and
//! its X_C and P_S records are fed back onto the first pulse.
//!
//! At k = 1 and g = −1 the write stores (−X_C, P_{A+} − P_C) in the + mode
//! and (X_{A−} + X_S, P_S) in the − mode.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::{apply_qnd, collective_kappa, differential_rotation, QndForm};
use crate::decoherence::DecoherenceBudget;
use crate::error::{Error, Result};
use crate::gaussian::{
    homodyne_condition, AtomicBasis, GaussianState, MeasuredMode, Mode, Outcome, Quadrature, StateRecord,
};
use crate::scenario::ScenarioConfig;

pub const WRITE_LAYOUT: [Mode; 4] = [Mode::LightC, Mode::LightS, Mode::AtomPlus, Mode::AtomMinus];
pub const READ_LAYOUT: [Mode; 6] = [
    Mode::LightC,
    Mode::LightS,
    Mode::AtomPlus,
    Mode::AtomMinus,
    Mode::MeterC,
    Mode::MeterS,
];
const ATOMS: [Mode; 2] = [Mode::AtomPlus, Mode::AtomMinus];
const LIGHT: [Mode; 2] = [Mode::LightC, Mode::LightS];

/// Parameters shared by write and read.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Protocol {
    pub k_eff: f64,
    pub gain: f64,
    pub budget: DecoherenceBudget,
    /// Variance per quadrature of the coherent-amplitude ensemble used for
    /// the mean fidelity.
    pub signal_variance: f64,
}

/// Outcome of a write or read.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolResult {
    /// Input quadratures → output quadratures, rows and columns ordered
    /// (X, P) of the first mode then (X, P) of the second.
    pub transfer_map: [[f64; 4]; 4],
    /// V_out − T V_in Tᵀ
    pub added_noise_matrix: [[f64; 4]; 4],
    /// Diagonal of [`Self::added_noise_matrix`].
    pub added_noise: [f64; 4],
    /// Ensemble fidelity of each output mode with its input (up to the sign
    /// of the transfer).
    pub mode_fidelity: [f64; 2],
    pub mean_fidelity: f64,
    pub budget: DecoherenceBudget,
    /// Unconditional output state.
    pub output: StateRecord,
}

impl ProtocolResult {
    pub fn transfer(&self) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |i, j| self.transfer_map[i][j])
    }

    pub fn noise(&self) -> DMatrix<f64> {
        DMatrix::from_fn(4, 4, |i, j| self.added_noise_matrix[i][j])
    }

    pub fn output_state(&self) -> Result<GaussianState> {
        GaussianState::from_record(&self.output)
    }
}

fn to_array(m: &DMatrix<f64>) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 4]; 4];
    for (i, row) in a.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)];
        }
    }
    a
}

fn cross_boundaries(state: &GaussianState, modes: &[Mode], transmission: f64) -> Result<GaussianState> {
    let mut out = state.clone();
    for &m in modes {
        out = out.beamsplitter_loss(m, transmission)?;
    }
    Ok(out)
}

/// Average fidelity of a mode whose output, for coherent input α, has mean
/// `T α + offset` and covariance `T Tᵀ/2 + noise`, with α drawn from
/// N(0, s² I). The target is σα with σ the sign of tr T.
pub fn ensemble_fidelity(t: &Matrix2<f64>, noise: &Matrix2<f64>, offset: &Vector2<f64>, s2: f64) -> f64 {
    let sigma = if t.trace() >= 0.0 { 1.0 } else { -1.0 };
    let half = Matrix2::identity() * 0.5;
    let big = t * half * t.transpose() + noise + half;
    let Some(m) = big.try_inverse() else {
        return 0.0;
    };
    let d = t - Matrix2::identity() * sigma;
    let a = Matrix2::identity() + d.transpose() * m * d * s2;
    let Some(a_inv) = a.try_inverse() else {
        return 0.0;
    };
    let q = m - m * d * a_inv * d.transpose() * m * s2;
    let exponent = -0.5 * (offset.transpose() * q * offset)[(0, 0)];
    let f = (big.determinant() * a.determinant()).sqrt().recip() * exponent.exp();
    f.clamp(0.0, 1.0)
}

impl Protocol {
    /// Lossless protocol with g = −1/k.
    pub fn unity_gain(k_eff: f64) -> Self {
        Protocol {
            k_eff,
            gain: if k_eff == 0.0 { 0.0 } else { -1.0 / k_eff },
            budget: DecoherenceBudget::lossless(),
            signal_variance: 1.0,
        }
    }

    pub fn from_scenario(cfg: &ScenarioConfig) -> Result<Self> {
        let k_eff = collective_kappa(cfg)?.k_eff;
        Ok(Protocol {
            gain: cfg.feedback_gain.unwrap_or(if k_eff == 0.0 { 0.0 } else { -1.0 / k_eff }),
            budget: DecoherenceBudget::from_scenario(cfg)?,
            signal_variance: cfg.signal_variance,
            k_eff,
        })
    }

    fn entry_exit(&self) -> (f64, f64) {
        let half = (self.budget.n_boundaries / 2) as i32;
        let t = self.budget.crossing_transmission().powi(half);
        (t, t)
    }

    fn light_pass(&self, state: &GaussianState, cosine: Mode, sine: Mode) -> Result<GaussianState> {
        let (t_in, t_out) = self.entry_exit();
        let s = cross_boundaries(state, &[cosine, sine], t_in)?;
        let s = apply_qnd(&s, self.k_eff, QndForm::TwoClass, cosine, sine)?;
        cross_boundaries(&s, &[cosine, sine], t_out)
    }

    fn write_prepare(&self, state: &GaussianState) -> Result<GaussianState> {
        state.require_basis(AtomicBasis::PlusMinus)?;
        if state.n_modes() != WRITE_LAYOUT.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * WRITE_LAYOUT.len(),
                found: 2 * state.n_modes(),
            });
        }
        let s = state.reduce(&WRITE_LAYOUT)?;
        let s = self.light_pass(&s, Mode::LightC, Mode::LightS)?;
        self.budget.apply_to_atoms(&s)
    }

    fn read_prepare(&self, stored: &GaussianState) -> Result<GaussianState> {
        stored.require_basis(AtomicBasis::PlusMinus)?;
        let s = stored
            .reduce(&ATOMS)?
            .with_vacuum_modes(&[Mode::LightC, Mode::LightS, Mode::MeterC, Mode::MeterS])?
            .reduce(&READ_LAYOUT)?;
        let s = self.light_pass(&s, Mode::LightC, Mode::LightS)?;
        let s = self.budget.apply_to_atoms(&s)?;
        let s = differential_rotation(&s, FRAC_PI_2, -FRAC_PI_2)?;
        self.light_pass(&s, Mode::MeterC, Mode::MeterS)
    }

    /// Measurement and feedback on one conditional run, returning the
    /// stored atomic state and the two records.
    pub fn write_trajectory(&self, state: &GaussianState, x_c: Outcome, p_s: Outcome) -> Result<(GaussianState, [f64; 2])> {
        let s = self.write_prepare(state)?;
        let (s, x) = homodyne_condition(&s, Mode::LightC, Quadrature::X, x_c, MeasuredMode::Remove)?;
        let s = s.displace(Mode::AtomPlus, self.gain * x, 0.0)?;
        let (s, p) = homodyne_condition(&s, Mode::LightS, Quadrature::P, p_s, MeasuredMode::Remove)?;
        let s = s.displace(Mode::AtomMinus, 0.0, -self.gain * p)?;
        Ok((s.reduce(&ATOMS)?, [x, p]))
    }

    /// Read counterpart of [`Self::write_trajectory`]; returns the output
    /// light and the two meter records.
    pub fn read_trajectory(&self, stored: &GaussianState, x_m: Outcome, p_m: Outcome) -> Result<(GaussianState, [f64; 2])> {
        let s = self.read_prepare(stored)?;
        let (s, x) = homodyne_condition(&s, Mode::MeterC, Quadrature::X, x_m, MeasuredMode::Remove)?;
        let s = s.displace(Mode::LightC, 0.0, -self.gain * x)?;
        let (s, p) = homodyne_condition(&s, Mode::MeterS, Quadrature::P, p_m, MeasuredMode::Remove)?;
        let s = s.displace(Mode::LightS, self.gain * p, 0.0)?;
        Ok((s.reduce(&LIGHT)?, [x, p]))
    }

    /// Unconditional stored state: feedback of a measured quadrature is the
    /// same linear map applied before the (then discarded) measurement.
    fn write_unconditional(&self, state: &GaussianState) -> Result<GaussianState> {
        let s = self.write_prepare(state)?;
        let mut f = DMatrix::identity(8, 8);
        f[(s.quadrature_index(Mode::AtomPlus, Quadrature::X)?, s.quadrature_index(Mode::LightC, Quadrature::X)?)] = self.gain;
        f[(s.quadrature_index(Mode::AtomMinus, Quadrature::P)?, s.quadrature_index(Mode::LightS, Quadrature::P)?)] = -self.gain;
        s.apply_linear(&f)?.reduce(&ATOMS)
    }

    fn read_unconditional(&self, stored: &GaussianState) -> Result<GaussianState> {
        let s = self.read_prepare(stored)?;
        let mut f = DMatrix::identity(12, 12);
        f[(s.quadrature_index(Mode::LightC, Quadrature::P)?, s.quadrature_index(Mode::MeterC, Quadrature::X)?)] = -self.gain;
        f[(s.quadrature_index(Mode::LightS, Quadrature::X)?, s.quadrature_index(Mode::MeterS, Quadrature::P)?)] = self.gain;
        s.apply_linear(&f)?.reduce(&LIGHT)
    }

    fn summarize(
        &self,
        input: &GaussianState,
        in_modes: [Mode; 2],
        output: GaussianState,
        run: impl Fn(&GaussianState) -> Result<GaussianState>,
    ) -> Result<ProtocolResult> {
        let base = run(input)?;
        let mut t = DMatrix::zeros(4, 4);
        for j in 0..4 {
            let (dx, dp) = if j % 2 == 0 { (1.0, 0.0) } else { (0.0, 1.0) };
            let shifted = run(&input.displace(in_modes[j / 2], dx, dp)?)?;
            t.set_column(j, &(shifted.means() - base.means()));
        }
        let inp = input.reduce(&in_modes)?;
        let noise = output.cov() - &t * inp.cov() * t.transpose();
        let offset: DVector<f64> = output.means() - &t * inp.means();

        let mut fid = [0.0; 2];
        for (k, f) in fid.iter_mut().enumerate() {
            let r = 2 * k;
            let tk = Matrix2::from_fn(|i, j| t[(r + i, r + j)]);
            let nk = Matrix2::from_fn(|i, j| noise[(r + i, r + j)]);
            let ok = Vector2::new(offset[r], offset[r + 1]);
            *f = ensemble_fidelity(&tk, &nk, &ok, self.signal_variance);
        }
        Ok(ProtocolResult {
            transfer_map: to_array(&t),
            added_noise_matrix: to_array(&noise),
            added_noise: [noise[(0, 0)], noise[(1, 1)], noise[(2, 2)], noise[(3, 3)]],
            mode_fidelity: fid,
            mean_fidelity: 0.5 * (fid[0] + fid[1]),
            budget: self.budget,
            output: output.to_record(),
        })
    }

    /// Stores the light modes of a `[LightC, LightS, AtomPlus, AtomMinus]`
    /// state (any order) in the atoms.
    pub fn write(&self, state: &GaussianState) -> Result<ProtocolResult> {
        let out = self.write_unconditional(state)?;
        self.summarize(state, LIGHT, out, |s| {
            Ok(self.write_trajectory(s, Outcome::Mean, Outcome::Mean)?.0)
        })
    }

    /// Retrieves the atomic modes of `stored` onto a fresh light pulse.
    pub fn read(&self, stored: &GaussianState) -> Result<ProtocolResult> {
        let stored = stored.reduce(&ATOMS)?;
        let out = self.read_unconditional(&stored)?;
        self.summarize(&stored, ATOMS, out, |s| Ok(self.read_trajectory(s, Outcome::Mean, Outcome::Mean)?.0))
    }
}

fn with_budget(k_eff: f64, gain: f64, budget: Option<&DecoherenceBudget>) -> Protocol {
    Protocol {
        gain,
        budget: budget.copied().unwrap_or_default(),
        ..Protocol::unity_gain(k_eff)
    }
}

pub fn run_write(state: &GaussianState, k_eff: f64, gain: f64, budget: Option<&DecoherenceBudget>) -> Result<ProtocolResult> {
    with_budget(k_eff, gain, budget).write(state)
}

pub fn run_read(stored: &GaussianState, k_eff: f64, gain: f64, budget: Option<&DecoherenceBudget>) -> Result<ProtocolResult> {
    with_budget(k_eff, gain, budget).read(stored)
}

/// One conditional write with sampled homodyne records.
pub fn write_trajectory(
    state: &GaussianState,
    k_eff: f64,
    gain: f64,
    budget: Option<&DecoherenceBudget>,
    seed: u64,
) -> Result<(GaussianState, [f64; 2])> {
    let seeds = [seed.wrapping_mul(2), seed.wrapping_mul(2).wrapping_add(1)];
    with_budget(k_eff, gain, budget).write_trajectory(state, Outcome::Sample(seeds[0]), Outcome::Sample(seeds[1]))
}
