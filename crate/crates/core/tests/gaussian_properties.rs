use std::f64::consts::FRAC_PI_2;

use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use qmemcell::gaussian::{
    hamiltonian_to_symplectic, homodyne_condition, symplectic_form, vacuum_state, AtomicBasis, GaussianState,
    MeasuredMode, Mode, Outcome, Quadrature, StateRecord,
};
use qmemcell::memory::{differential_rotation_map, qnd_transform, QndForm};

const MODES: [Mode; 4] = [Mode::LightC, Mode::LightS, Mode::AtomPlus, Mode::AtomMinus];

/// A physical random state: a random symplectic map applied to a thermal state.
fn random_state(h: Vec<f64>, thermal: Vec<f64>, means: Vec<f64>) -> GaussianState {
    let hm = DMatrix::from_fn(8, 8, |i, j| 0.5 * (h[8 * i + j] + h[8 * j + i]));
    let s = hamiltonian_to_symplectic(&hm, 0.3).unwrap();
    let v = DMatrix::from_diagonal(&DVector::from_fn(8, |i, _| 0.5 + thermal[i / 2]));
    GaussianState::from_moments(&MODES, AtomicBasis::PlusMinus, DVector::from_vec(means), v)
        .unwrap()
        .apply_symplectic(&s)
        .unwrap()
}

fn state_strategy() -> impl Strategy<Value = GaussianState> {
    (
        prop::collection::vec(-1.0..1.0f64, 64),
        prop::collection::vec(0.0..1.0f64, 8),
        prop::collection::vec(-3.0..3.0f64, 8),
    )
        .prop_map(|(h, t, m)| random_state(h, t, m))
}

fn check(s: &GaussianState) -> Result<(), TestCaseError> {
    prop_assert!(s.asymmetry() < 1e-12);
    prop_assert!(s.satisfies_uncertainty(1e-10), "margin {}", s.uncertainty_margin());
    Ok(())
}

proptest! {
    #[test]
    fn random_hamiltonians_give_symplectic_maps(h in prop::collection::vec(-1.0..1.0f64, 64), t in -2.0..2.0f64) {
        let hm = DMatrix::from_fn(8, 8, |i, j| 0.5 * (h[8 * i + j] + h[8 * j + i]));
        let s = hamiltonian_to_symplectic(&hm, t).unwrap();
        prop_assert!(s.symplectic_residual() < 1e-10);
        let back = s.then(&s.inverse()).unwrap();
        prop_assert!((back.matrix() - DMatrix::<f64>::identity(8, 8)).amax() < 1e-10);
    }

    #[test]
    fn operations_keep_states_physical(
        s in state_strategy(),
        theta in -4.0..4.0f64,
        t in 0.0..1.0f64,
        k in -2.0..2.0f64,
        seed in any::<u64>(),
    ) {
        check(&s)?;
        check(&s.rotate_mode(Mode::AtomPlus, theta).unwrap())?;
        check(&s.beamsplitter_loss(Mode::LightS, t).unwrap())?;
        check(&s.apply_symplectic(&qnd_transform(k, QndForm::TwoClass).unwrap()).unwrap())?;
        check(&s.to_basis(AtomicBasis::Classes).unwrap())?;
        for after in [MeasuredMode::Remove, MeasuredMode::ResetToVacuum] {
            let (c, _) = homodyne_condition(&s, Mode::LightC, Quadrature::P, Outcome::Sample(seed), after).unwrap();
            check(&c)?;
        }
    }

    #[test]
    fn symplectic_round_trip_restores_state(s in state_strategy(), k in -2.0..2.0f64) {
        let q = qnd_transform(k, QndForm::TwoClass).unwrap();
        let back = s.apply_symplectic(&q).unwrap().apply_symplectic(&q.inverse()).unwrap();
        prop_assert!((back.cov() - s.cov()).amax() < 1e-10);
        prop_assert!((back.means() - s.means()).amax() < 1e-10);
    }

    #[test]
    fn basis_change_is_an_involution(s in state_strategy()) {
        let back = s.to_basis(AtomicBasis::Classes).unwrap().to_basis(AtomicBasis::PlusMinus).unwrap();
        prop_assert_eq!(back.modes(), s.modes());
        prop_assert!((back.cov() - s.cov()).amax() < 1e-12);
    }

    #[test]
    fn displacements_compose(a in -5.0..5.0f64, b in -5.0..5.0f64, c in -5.0..5.0f64, d in -5.0..5.0f64) {
        let v = vacuum_state(4, AtomicBasis::PlusMinus).unwrap();
        let two = v.displace(Mode::LightC, a, b).unwrap().displace(Mode::LightC, c, d).unwrap();
        let one = v.displace(Mode::LightC, a + c, b + d).unwrap();
        prop_assert!((two.means() - one.means()).amax() < 1e-14);
        prop_assert_eq!(two.cov(), v.cov());
    }

    #[test]
    fn json_round_trip(s in state_strategy()) {
        let text = serde_json::to_string(&s.to_record()).unwrap();
        let rec: StateRecord = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(GaussianState::from_record(&rec).unwrap(), s);
    }

    #[test]
    fn rotations_compose_and_preserve_omega(phi1 in -7.0..7.0f64, phi2 in -7.0..7.0f64) {
        let m = differential_rotation_map(phi1, phi2);
        let omega = symplectic_form(2);
        prop_assert!((m.matrix() * &omega * m.matrix().transpose() - omega).amax() < 1e-12);
    }
}

#[test]
fn four_quarter_turns_are_identity() {
    let s = vacuum_state(4, AtomicBasis::PlusMinus)
        .unwrap()
        .displace(Mode::AtomMinus, 0.4, -2.0)
        .unwrap();
    let mut r = s.clone();
    for _ in 0..4 {
        r = r.rotate_mode(Mode::AtomMinus, FRAC_PI_2).unwrap();
    }
    assert!((r.means() - s.means()).amax() < 1e-14);
    let q = s.rotate_mode(Mode::AtomMinus, FRAC_PI_2).unwrap();
    assert!((q.mode_means(Mode::AtomMinus).unwrap()[0] + 2.0).abs() < 1e-15);
}

#[test]
fn sampled_records_are_bit_reproducible() {
    let s = vacuum_state(4, AtomicBasis::PlusMinus)
        .unwrap()
        .apply_symplectic(&qnd_transform(1.0, QndForm::TwoClass).unwrap())
        .unwrap();
    let run = || {
        let (c, x) = homodyne_condition(&s, Mode::LightC, Quadrature::X, Outcome::Sample(77), MeasuredMode::Remove).unwrap();
        (c.means().iter().map(|v| v.to_bits()).collect::<Vec<_>>(), x.to_bits())
    };
    assert_eq!(run(), run());
}
