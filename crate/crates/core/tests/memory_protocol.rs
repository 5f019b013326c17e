use nalgebra::{DMatrix, Matrix2, Vector2};
use proptest::prelude::*;
use qmemcell::decoherence::DecoherenceBudget;
use qmemcell::gaussian::{vacuum_state, AtomicBasis, GaussianState, Mode};
use qmemcell::memory::{run_read, run_write, write_trajectory};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn vac4() -> GaussianState {
    vacuum_state(4, AtomicBasis::PlusMinus).unwrap()
}

fn atoms() -> GaussianState {
    vac4().reduce(&[Mode::AtomPlus, Mode::AtomMinus]).unwrap()
}

fn with_eta(eta: f64) -> DecoherenceBudget {
    DecoherenceBudget {
        eta,
        ..DecoherenceBudget::lossless()
    }
}

/// |⟨β|ρ|β⟩| for a single-mode Gaussian ρ with the given mean and covariance.
fn coherent_overlap(mean: [f64; 2], cov: &DMatrix<f64>, beta: [f64; 2]) -> f64 {
    let sigma = Matrix2::new(cov[(0, 0)] + 0.5, cov[(0, 1)], cov[(1, 0)], cov[(1, 1)] + 0.5);
    let d = Vector2::new(mean[0] - beta[0], mean[1] - beta[1]);
    let q = (d.transpose() * sigma.try_inverse().unwrap() * d)[(0, 0)];
    (-0.5 * q).exp() / sigma.determinant().sqrt()
}

#[test]
fn monte_carlo_agrees_with_closed_form_fidelity() {
    let closed = run_write(&vac4(), 1.0, -1.0, None).unwrap().mean_fidelity;
    let trials = 100_000;
    let amp = Normal::new(0.0, 1.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut total = 0.0;
    for i in 0..trials {
        let a: [f64; 4] = std::array::from_fn(|_| amp.sample(&mut rng));
        let input = vac4()
            .displace(Mode::LightC, a[0], a[1])
            .unwrap()
            .displace(Mode::LightS, a[2], a[3])
            .unwrap();
        let (stored, _) = write_trajectory(&input, 1.0, -1.0, None, i as u64).unwrap();
        // the + mode stores −α_C, the − mode stores +α_S
        let fp = coherent_overlap(
            stored.mode_means(Mode::AtomPlus).unwrap(),
            &stored.mode_cov(Mode::AtomPlus).unwrap(),
            [-a[0], -a[1]],
        );
        let fm = coherent_overlap(
            stored.mode_means(Mode::AtomMinus).unwrap(),
            &stored.mode_cov(Mode::AtomMinus).unwrap(),
            [a[2], a[3]],
        );
        total += 0.5 * (fp + fm);
    }
    let mc = total / trials as f64;
    assert!((mc / closed - 1.0).abs() < 0.01, "monte carlo {mc} vs closed form {closed}");
    assert!((closed - 2.0 / 6f64.sqrt()).abs() < 1e-12);
}

#[test]
fn conditional_variances_are_record_independent() {
    let a = write_trajectory(&vac4(), 1.0, -1.0, None, 1).unwrap().0;
    let b = write_trajectory(&vac4(), 1.0, -1.0, None, 99).unwrap().0;
    assert!((a.cov() - b.cov()).amax() < 1e-14);
    assert_ne!(a.means(), b.means());
}

#[test]
fn read_after_write_returns_the_signal() {
    let input = vac4()
        .displace(Mode::LightC, 1.2, -0.4)
        .unwrap()
        .displace(Mode::LightS, -0.3, 0.9)
        .unwrap();
    let w = run_write(&input, 1.0, -1.0, None).unwrap();
    let stored = w.output_state().unwrap();
    let r = run_read(&stored, 1.0, -1.0, None).unwrap();
    let total = r.transfer() * w.transfer();
    let minus_id = -DMatrix::<f64>::identity(4, 4);
    assert!((&total - &minus_id).amax() < 1e-12);

    let out = r.output_state().unwrap();
    let expected = [-1.2, 0.4, 0.3, -0.9];
    for (k, e) in expected.iter().enumerate() {
        assert!((out.means()[k] - e).abs() < 1e-12);
    }
    let v_in = input.reduce(&[Mode::LightC, Mode::LightS]).unwrap();
    let added = out.cov() - &total * v_in.cov() * total.transpose();
    for k in 0..4 {
        assert!(added[(k, k)] <= 1.0 + 1e-10, "quadrature {k}: {}", added[(k, k)]);
        assert!(added[(k, k)] >= -1e-10);
    }
}

#[test]
fn read_of_vacuum_memory_carries_no_signal() {
    let r = run_read(&atoms(), 1.0, -1.0, None).unwrap();
    let out = r.output_state().unwrap();
    assert!(out.means().amax() < 1e-15);
    assert!(out.satisfies_uncertainty(1e-10));
    for k in 0..4 {
        assert!((out.cov()[(k, k)] - (0.5 + r.added_noise[k])).abs() < 1e-12);
    }
}

#[test]
fn fidelity_falls_with_collisions() {
    let etas = [0.0, 0.0065, 0.05];
    let writes: Vec<f64> = etas
        .iter()
        .map(|&e| run_write(&vac4(), 1.0, -1.0, Some(&with_eta(e))).unwrap().mean_fidelity)
        .collect();
    let reads: Vec<f64> = etas
        .iter()
        .map(|&e| run_read(&atoms(), 1.0, -1.0, Some(&with_eta(e))).unwrap().mean_fidelity)
        .collect();
    for f in [&writes, &reads] {
        assert!(f[0] > f[1] && f[1] > f[2], "{f:?}");
    }
}

#[test]
fn boundary_loss_noise_doubles_with_twice_the_crossings() {
    let excess = |n| {
        let b = DecoherenceBudget {
            boundary_loss: 0.02,
            n_boundaries: n,
            ..DecoherenceBudget::lossless()
        };
        let lossy = run_write(&vac4(), 1.0, -1.0, Some(&b)).unwrap().added_noise;
        let clean = run_write(&vac4(), 1.0, -1.0, None).unwrap().added_noise;
        lossy.iter().zip(&clean).map(|(a, c)| a - c).sum::<f64>()
    };
    let ratio = excess(4) / excess(2);
    assert!((ratio / 2.0 - 1.0).abs() < 0.05, "ratio {ratio}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn protocol_outputs_are_physical(
        k in -2.0..2.0f64,
        g in -2.0..2.0f64,
        eta in 0.0..0.2f64,
        n_phot in 0.0..0.2f64,
        loss in 0.0..0.1f64,
        n in prop::sample::select(vec![0u32, 2, 4]),
    ) {
        let b = DecoherenceBudget { eta, n_phot, boundary_loss: loss, n_boundaries: n, gamma_ph: 0.0 };
        let w = run_write(&vac4(), k, g, Some(&b)).unwrap();
        let r = run_read(&atoms(), k, g, Some(&b)).unwrap();
        for res in [&w, &r] {
            prop_assert!((0.0..=1.0).contains(&res.mean_fidelity));
            prop_assert!(res.added_noise.iter().all(|&v| v >= -1e-10));
            let out = res.output_state().unwrap();
            prop_assert!(out.asymmetry() < 1e-12);
            prop_assert!(out.satisfies_uncertainty(1e-10));
        }
    }
}
