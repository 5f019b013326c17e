//! Atom–light QND coupling of the two atomic classes, quadrature rotations
//! and the write/read memory protocols.
//!
//! Class 1 (atoms in m = −F) and class 2 (m = +F) precess in opposite
//! senses: their quadratures are defined from coherences with opposite
//! i-signs, so a rotation that sends P₁ → X₁ sends P₂ → −X₂. In the
//! `(AtomPlus, AtomMinus)` basis a common rotation therefore mixes the two
//! modes, while a π differential phase between the classes does not.

mod protocol;

use std::f64::consts::SQRT_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use protocol::{
    ensemble_fidelity, run_read, run_write, write_trajectory, Protocol, ProtocolResult, READ_LAYOUT, WRITE_LAYOUT,
};

use crate::error::{Error, Result};
use crate::gaussian::{hamiltonian_to_symplectic, rotation_block, AtomicBasis, GaussianState, Mode, SymplecticTransform};
use crate::scenario::ScenarioConfig;
use crate::units::{dipole_moment_squared, vacuum_field_squared, CODATA};

/// F of the cesium working level, fixing the Clebsch–Gordan radical.
const F_CS: i32 = 4;

/// Raman coupling of the m ↔ m+1 coherence (rad/s).
pub fn coupling_g(m: i32, e0sq: f64, mu0sq: f64, delta: f64) -> Result<f64> {
    if !(-F_CS..F_CS).contains(&m) {
        return Err(Error::OutOfRange {
            name: "m",
            value: m as f64,
            range: "[-4, 3]",
        });
    }
    if delta == 0.0 {
        return Err(Error::ZeroDetuning("delta"));
    }
    let radical = ((F_CS * (F_CS + 1) - m * (m + 1)) as f64).sqrt();
    Ok(mu0sq * e0sq * radical / (48.0 * CODATA.hbar * CODATA.hbar * delta))
}

/// κ = −E₀²μ₀²√(N_L N_A)/(12ħ²Δ) in rad/s.
pub fn kappa_rate(e0sq: f64, mu0sq: f64, photon_number: f64, atom_number: f64, delta: f64) -> Result<f64> {
    if delta == 0.0 {
        return Err(Error::ZeroDetuning("delta"));
    }
    Ok(-e0sq * mu0sq * (photon_number * atom_number).sqrt() / (12.0 * CODATA.hbar * CODATA.hbar * delta))
}

/// Couplings of a scenario's probe pulse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingSet {
    /// `(m, G_m)` in rad/s for m = −F … F−1.
    pub g_m: Vec<(i32, f64)>,
    /// κ in rad/s.
    pub kappa: f64,
    /// κτ
    pub kappa_tau: f64,
    /// √2 κτ, the coupling of the two-class interaction.
    pub k_eff: f64,
}

/// Couplings of the scenario's probe on the D2 line.
pub fn collective_kappa(cfg: &ScenarioConfig) -> Result<CouplingSet> {
    let s = &cfg.species;
    let e0sq = vacuum_field_squared(cfg.beam_area, cfg.pulse_duration, s.lambda_d2);
    let mu0sq = dipole_moment_squared(s.gamma_d2, s.lambda_d2);
    let g_m = (-F_CS..F_CS)
        .map(|m| coupling_g(m, e0sq, mu0sq, cfg.probe_detuning).map(|g| (m, g)))
        .collect::<Result<Vec<_>>>()?;
    let kappa = kappa_rate(e0sq, mu0sq, cfg.photon_number, cfg.atom_number, cfg.probe_detuning)?;
    let kappa_tau = kappa * cfg.pulse_duration;
    Ok(CouplingSet {
        g_m,
        kappa,
        kappa_tau,
        k_eff: SQRT_2 * kappa_tau,
    })
}

/// Which interaction Hamiltonian to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QndForm {
    /// k(P_C X_{A+} + X_S P_{A−}) in the ± basis.
    TwoClass,
    /// κ(P_C X₁ + X_S P₁), class 1 alone.
    ClassOne,
    /// κ(P_C X₂ − X_S P₂), class 2 alone.
    ClassTwo,
    /// Both single-class terms together in the class basis.
    BothClasses,
}

impl QndForm {
    pub fn basis(self) -> AtomicBasis {
        match self {
            QndForm::TwoClass => AtomicBasis::PlusMinus,
            _ => AtomicBasis::Classes,
        }
    }
}

/// Quadratic form of the interaction on an arbitrary mode layout, with
/// `cosine`/`sine` naming the light modes that take part.
///
/// `k_eff` is the two-class coupling; single-class forms use κτ = k_eff/√2
/// so that [`QndForm::BothClasses`] is [`QndForm::TwoClass`] written in the
/// class basis.
pub fn qnd_hamiltonian(
    k_eff: f64,
    form: QndForm,
    layout: &[Mode],
    basis: AtomicBasis,
    cosine: Mode,
    sine: Mode,
) -> Result<DMatrix<f64>> {
    if basis != form.basis() {
        return Err(Error::WrongBasis {
            expected: form.basis(),
            found: basis,
        });
    }
    let pos = |m: Mode| layout.iter().position(|&x| x == m).ok_or(Error::UnknownMode(m));
    let pc = 2 * pos(cosine)? + 1;
    let xs = 2 * pos(sine)?;
    let (a, b) = basis.pair();

    let mut h = DMatrix::zeros(2 * layout.len(), 2 * layout.len());
    let mut couple = |i: usize, j: usize, c: f64| {
        h[(i, j)] += c;
        h[(j, i)] += c;
    };
    let kappa = k_eff / SQRT_2;
    if form == QndForm::TwoClass {
        let (xa, pa) = (2 * pos(a)?, 2 * pos(b)? + 1);
        couple(pc, xa, k_eff);
        couple(xs, pa, k_eff);
    }
    if matches!(form, QndForm::ClassOne | QndForm::BothClasses) {
        let i = 2 * pos(a)?;
        couple(pc, i, kappa);
        couple(xs, i + 1, kappa);
    }
    if matches!(form, QndForm::ClassTwo | QndForm::BothClasses) {
        let i = 2 * pos(b)?;
        couple(pc, i, kappa);
        couple(xs, i + 1, -kappa);
    }
    Ok(h)
}

/// Interaction map on the layout `[LightC, LightS, a, b]` of the form's
/// basis.
pub fn qnd_transform(k_eff: f64, form: QndForm) -> Result<SymplecticTransform> {
    let (a, b) = form.basis().pair();
    let layout = [Mode::LightC, Mode::LightS, a, b];
    let h = qnd_hamiltonian(k_eff, form, &layout, form.basis(), Mode::LightC, Mode::LightS)?;
    hamiltonian_to_symplectic(&h, 1.0)
}

/// Applies the interaction between the state's atoms and the named light
/// modes.
pub fn apply_qnd(state: &GaussianState, k_eff: f64, form: QndForm, cosine: Mode, sine: Mode) -> Result<GaussianState> {
    let h = qnd_hamiltonian(k_eff, form, state.modes(), state.basis(), cosine, sine)?;
    state.apply_symplectic(&hamiltonian_to_symplectic(&h, 1.0)?)
}

/// Map on `(X₊, P₊, X₋, P₋)` induced by rotating class 1 by `phi1` and
/// class 2 by `phi2`, each in its own sense.
pub fn differential_rotation_map(phi1: f64, phi2: f64) -> SymplecticTransform {
    let r1 = rotation_block(phi1);
    let r2 = rotation_block(-phi2);
    let mut m = DMatrix::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            let sum = 0.5 * (r1[i][j] + r2[i][j]);
            let diff = 0.5 * (r1[i][j] - r2[i][j]);
            m[(i, j)] = sum;
            m[(i + 2, j + 2)] = sum;
            m[(i, j + 2)] = diff;
            m[(i + 2, j)] = diff;
        }
    }
    SymplecticTransform::new(m).expect("orthogonal")
}

fn embed_atomic(state: &GaussianState, map: &SymplecticTransform) -> Result<DMatrix<f64>> {
    state.require_basis(AtomicBasis::PlusMinus)?;
    let idx = [
        2 * state.index_of(Mode::AtomPlus)?,
        2 * state.index_of(Mode::AtomMinus)?,
    ];
    let dim = 2 * state.n_modes();
    let mut full = DMatrix::identity(dim, dim);
    let m = map.matrix();
    for (bi, &i) in idx.iter().enumerate() {
        for (bj, &j) in idx.iter().enumerate() {
            for r in 0..2 {
                for c in 0..2 {
                    full[(i + r, j + c)] = m[(2 * bi + r, 2 * bj + c)];
                }
            }
        }
    }
    Ok(full)
}

/// Rotates class 1 by `phi1` and class 2 by `phi2`, the state staying in the
/// ± basis.
pub fn differential_rotation(state: &GaussianState, phi1: f64, phi2: f64) -> Result<GaussianState> {
    let full = embed_atomic(state, &differential_rotation_map(phi1, phi2))?;
    state.apply_linear(&full)
}

/// A weak common pulse: both classes turn by `theta`, in opposite senses.
pub fn common_weak_rotation(state: &GaussianState, theta: f64) -> Result<GaussianState> {
    differential_rotation(state, theta, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::vacuum_state;
    use crate::units::hz_to_rad;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn basis_change() -> DMatrix<f64> {
        // (X₁,P₁,X₂,P₂) → (X₊,P₊,X₋,P₋)
        let h = 1.0 / SQRT_2;
        let mut b = DMatrix::zeros(4, 4);
        for q in 0..2 {
            b[(q, q)] = h;
            b[(q, q + 2)] = h;
            b[(q + 2, q)] = h;
            b[(q + 2, q + 2)] = -h;
        }
        b
    }

    #[test]
    fn coupling_radicals() {
        let g = |m| coupling_g(m, 1.0, 1.0, 1.0).unwrap();
        let unit = 1.0 / (48.0 * CODATA.hbar * CODATA.hbar);
        assert_relative_eq!(g(-4), unit * 8f64.sqrt(), max_relative = 1e-14);
        for m in -4..=3 {
            assert_relative_eq!(g(m), g(-(m + 1)), max_relative = 1e-14);
        }
        assert!(coupling_g(4, 1.0, 1.0, 1.0).is_err());
        assert!(coupling_g(-5, 1.0, 1.0, 1.0).is_err());
        assert!(matches!(coupling_g(0, 1.0, 1.0, 0.0), Err(Error::ZeroDetuning(_))));
    }

    #[test]
    fn kappa_scaling() {
        assert_eq!(kappa_rate(1.0, 1.0, 0.0, 1e12, 1e9).unwrap(), 0.0);
        let k = kappa_rate(1e-10, 1e-58, 1e12, 1e12, 1e9).unwrap();
        assert!(k < 0.0);
        assert_relative_eq!(kappa_rate(1e-10, 1e-58, 4e12, 1e12, 1e9).unwrap(), 2.0 * k, max_relative = 1e-14);
        assert_relative_eq!(kappa_rate(1e-10, 1e-58, 1e12, 1e12, -1e9).unwrap(), -k, max_relative = 1e-14);
        assert!(kappa_rate(1.0, 1.0, 1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn scenario_couplings() {
        let cfg = ScenarioConfig::default();
        let c = collective_kappa(&cfg).unwrap();
        assert_eq!(c.g_m.len(), 8);
        assert_relative_eq!(c.k_eff, SQRT_2 * c.kappa * cfg.pulse_duration, max_relative = 1e-14);
        let ratio = c.g_m[0].1 / c.g_m[3].1;
        assert_relative_eq!(ratio, (8.0f64 / 20.0).sqrt(), max_relative = 1e-14);
        let blue = ScenarioConfig {
            probe_detuning: hz_to_rad(-7e8),
            ..cfg
        };
        assert_relative_eq!(collective_kappa(&blue).unwrap().kappa, -c.kappa, max_relative = 1e-14);
    }

    #[test]
    fn two_class_map_entries() {
        let k = 0.7;
        let s = qnd_transform(k, QndForm::TwoClass).unwrap();
        let mut expected = DMatrix::identity(8, 8);
        expected[(0, 4)] = k; // X_C += k X₊
        expected[(5, 1)] = -k; // P₊ −= k P_C
        expected[(3, 7)] = -k; // P_S −= k P₋
        expected[(6, 2)] = k; // X₋ += k X_S
        assert!((s.matrix() - &expected).amax() < 1e-15);
        assert_eq!(qnd_transform(0.0, QndForm::TwoClass).unwrap(), SymplecticTransform::identity(4));
    }

    #[test]
    fn both_classes_equal_two_class_after_basis_change() {
        let k = 1.3;
        let both = qnd_transform(k, QndForm::BothClasses).unwrap();
        let two = qnd_transform(k, QndForm::TwoClass).unwrap();
        let mut t = DMatrix::identity(8, 8);
        t.view_mut((4, 4), (4, 4)).copy_from(&basis_change());
        let conj = &t * both.matrix() * &t;
        assert!((conj - two.matrix()).amax() < 1e-14);
    }

    #[test]
    fn single_class_maps_couple_c_and_s() {
        for form in [QndForm::ClassOne, QndForm::ClassTwo] {
            let s = vacuum_state(4, AtomicBasis::Classes)
                .unwrap()
                .apply_symplectic(&qnd_transform(1.0, form).unwrap())
                .unwrap();
            let cross = s.cov().view((0, 2), (2, 2)).amax();
            assert_relative_eq!(cross, 0.125, max_relative = 1e-12);
        }
        let s = vacuum_state(4, AtomicBasis::PlusMinus)
            .unwrap()
            .apply_symplectic(&qnd_transform(1.0, QndForm::TwoClass).unwrap())
            .unwrap();
        assert!(s.cov().view((0, 2), (2, 2)).amax() < 1e-12);
    }

    #[test]
    fn wrong_basis_is_rejected() {
        let s = vacuum_state(4, AtomicBasis::Classes).unwrap();
        assert!(matches!(
            apply_qnd(&s, 1.0, QndForm::TwoClass, Mode::LightC, Mode::LightS),
            Err(Error::WrongBasis { .. })
        ));
        assert!(common_weak_rotation(&s, 0.3).is_err());
    }

    #[test]
    fn weak_pulse_mixes_modes() {
        let m = differential_rotation_map(FRAC_PI_2, FRAC_PI_2);
        // rows are outputs (X₊, P₊, X₋, P₋)
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, 0.0, 1.0, //
                0.0, 0.0, -1.0, 0.0, //
                0.0, 1.0, 0.0, 0.0, //
                -1.0, 0.0, 0.0, 0.0,
            ],
        );
        assert!((m.matrix() - &expected).amax() < 1e-15);
        assert_eq!(differential_rotation_map(0.0, 0.0), SymplecticTransform::identity(2));
    }

    #[test]
    fn twice_weak_pulse_versus_composed_matrix() {
        let once = differential_rotation_map(FRAC_PI_2, FRAC_PI_2);
        let twice = differential_rotation_map(PI, PI);
        assert!((once.matrix() * once.matrix() - twice.matrix()).amax() < 1e-15);
        // X₊ → −X₊ ... each quadrature returns to ± itself, no longer a π/2 turn
        assert!((twice.matrix() + DMatrix::<f64>::identity(4, 4)).amax() < 1e-15);
        let per_mode = differential_rotation_map(FRAC_PI_2, -FRAC_PI_2);
        assert!((twice.matrix() - per_mode.matrix()).amax() > 0.5);
    }

    #[test]
    fn differential_pulse_is_per_mode() {
        let m = differential_rotation_map(FRAC_PI_2, -FRAC_PI_2);
        let r = rotation_block(FRAC_PI_2);
        for blk in [0, 2] {
            for i in 0..2 {
                for j in 0..2 {
                    assert_relative_eq!(m.matrix()[(blk + i, blk + j)], r[i][j], epsilon = 1e-15);
                }
            }
        }
        assert!(m.matrix().view((0, 2), (2, 2)).amax() < 1e-15);
        assert!(m.matrix().view((2, 0), (2, 2)).amax() < 1e-15);

        let s = vacuum_state(4, AtomicBasis::PlusMinus)
            .unwrap()
            .displace(Mode::AtomPlus, 0.0, 1.0)
            .unwrap();
        let out = differential_rotation(&s, FRAC_PI_2, -FRAC_PI_2).unwrap();
        let [x, p] = out.mode_means(Mode::AtomPlus).unwrap();
        assert_relative_eq!(x, 1.0, epsilon = 1e-15);
        assert!(p.abs() < 1e-15);
    }

    #[test]
    fn equal_phases_reproduce_weak_pulse() {
        let s = vacuum_state(4, AtomicBasis::PlusMinus)
            .unwrap()
            .displace(Mode::AtomMinus, 0.3, -1.1)
            .unwrap();
        assert_eq!(
            differential_rotation(&s, 0.4, 0.4).unwrap(),
            common_weak_rotation(&s, 0.4).unwrap()
        );
    }

    proptest! {
        #[test]
        fn half_turn_difference_separates_modes_in_common_frame(phi1 in 0.0..(2.0 * PI)) {
            // Block-diagonal once the common phase (φ₁+φ₂)/2 is undone.
            let phi2 = phi1 - PI;
            let common = 0.5 * (phi1 + phi2);
            let m = differential_rotation_map(-common, -common).matrix() * differential_rotation_map(phi1, phi2).matrix();
            prop_assert!(m.view((0, 2), (2, 2)).amax() < 1e-12);
            prop_assert!(m.view((2, 0), (2, 2)).amax() < 1e-12);
        }

        #[test]
        fn qnd_conserves_its_quadratures(k in -3.0..3.0f64, xs in prop::collection::vec(-2.0..2.0f64, 8)) {
            let s = qnd_transform(k, QndForm::TwoClass).unwrap();
            let v = nalgebra::DVector::from_vec(xs);
            let out = s.matrix() * &v;
            for i in [4, 1, 7, 2] {
                prop_assert_eq!(out[i], v[i]);
            }
            let n = s.matrix() - DMatrix::identity(8, 8);
            prop_assert!((&n * &n).amax() == 0.0);
        }
    }
}
