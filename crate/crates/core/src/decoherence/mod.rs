//! Noise sources of the single-cell memory: spin-exchange collisions,
//! photon scattering from the auxiliary fields, cell-boundary losses and
//! the residual population left by optical pumping.

mod pumping;
mod quadrature;

use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

pub use pumping::{evolve_pumping, evolve_pumping_traced, Branching, Level, PumpLevelSystem};
pub use quadrature::{integrate, QuadratureOptions};

use crate::error::{Error, Result};
use crate::gaussian::GaussianState;
use crate::scenario::ScenarioConfig;
use crate::shifts::stark_compensation_intensity;
use crate::units::{saturation_intensity, SpeciesData};

/// Meaning of the Doppler "half-width" parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WidthConvention {
    /// Half width at half maximum: σ = w/√(2 ln 2).
    #[default]
    Hwhm,
    /// The width is the standard deviation itself.
    StdDev,
}

impl WidthConvention {
    pub fn sigma(self, width: f64) -> f64 {
        match self {
            WidthConvention::Hwhm => width / (2.0 * LN_2).sqrt(),
            WidthConvention::StdDev => width,
        }
    }
}

/// Per-pulse noise figures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecoherenceBudget {
    /// Spin-exchange collision probability per atom.
    pub eta: f64,
    /// Photon scattering rate per atom (1/s).
    pub gamma_ph: f64,
    /// Scattered photons per atom.
    pub n_phot: f64,
    /// Intensity loss per boundary crossing.
    pub boundary_loss: f64,
    /// Boundary crossings of each light pulse.
    pub n_boundaries: u32,
}

impl DecoherenceBudget {
    pub fn lossless() -> Self {
        DecoherenceBudget {
            eta: 0.0,
            gamma_ph: 0.0,
            n_phot: 0.0,
            boundary_loss: 0.0,
            n_boundaries: 0,
        }
    }

    /// Budget of one write or read pulse of the scenario: collisions during
    /// τ, scattering of the Stark compensation field during τ, and the
    /// configured boundary losses.
    pub fn from_scenario(cfg: &ScenarioConfig) -> Result<Self> {
        let s = &cfg.species;
        let eta = spin_exchange_probability(s.spin_exchange_cross_section, s.mean_speed, cfg.pulse_duration, cfg.atom_density);
        let intensity = stark_compensation_intensity(cfg.omega_b, cfg.stark_detuning, s)?;
        let gamma_ph = doppler_averaged_scattering(
            intensity,
            stark_scattering_detuning(cfg.stark_detuning, s),
            s.doppler_halfwidth,
            cfg.doppler_width,
            s,
        )?;
        Ok(DecoherenceBudget {
            eta,
            gamma_ph,
            n_phot: gamma_ph * cfg.pulse_duration,
            boundary_loss: cfg.boundary_loss,
            n_boundaries: cfg.n_boundaries,
        })
    }

    /// Transmission of a single boundary crossing.
    pub fn crossing_transmission(&self) -> f64 {
        1.0 - self.boundary_loss
    }

    /// Attenuation of the atomic modes by collisions and scattering.
    pub fn apply_to_atoms(&self, state: &GaussianState) -> Result<GaussianState> {
        let after_collisions = apply_spin_exchange(state, self.eta)?;
        apply_spin_exchange(&after_collisions, self.n_phot.min(1.0))
    }
}

impl Default for DecoherenceBudget {
    fn default() -> Self {
        Self::lossless()
    }
}

/// η = σ v τ ρ, clamped to [0, 1].
pub fn spin_exchange_probability(sigma: f64, v: f64, tau: f64, rho: f64) -> f64 {
    (sigma * v * tau * rho).clamp(0.0, 1.0)
}

/// Shortens every atomic mode by (1 − η) and fills the gap with vacuum.
pub fn apply_spin_exchange(state: &GaussianState, eta: f64) -> Result<GaussianState> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::OutOfRange {
            name: "eta",
            value: eta,
            range: "[0, 1]",
        });
    }
    let t = (1.0 - eta) * (1.0 - eta);
    let mut out = state.clone();
    for &m in state.modes().iter().filter(|m| m.is_atomic()) {
        out = out.beamsplitter_loss(m, t)?;
    }
    Ok(out)
}

/// Scattering rate of a two-level atom on the D1 line at detuning
/// `detuning_prime` (rad/s).
pub fn scattering_rate(intensity: f64, detuning_prime: f64, gamma: f64, wavelength: f64) -> f64 {
    if intensity <= 0.0 {
        return 0.0;
    }
    if intensity.is_infinite() {
        return gamma / 2.0;
    }
    let x = 2.0 * detuning_prime / gamma;
    let s = intensity / saturation_intensity(gamma, wavelength) / (1.0 + x * x);
    gamma / 2.0 * s / (1.0 + s)
}

/// Detuning of the Stark field from the nearer D1 hyperfine component.
pub fn stark_scattering_detuning(delta_s: f64, species: &SpeciesData) -> f64 {
    (delta_s.abs() - species.delta2 / 2.0).abs()
}

/// Scattering rate averaged over a Gaussian distribution of detunings
/// centred on `center` (rad/s) with the given width.
pub fn doppler_averaged_scattering(
    intensity: f64,
    center: f64,
    width: f64,
    convention: WidthConvention,
    species: &SpeciesData,
) -> Result<f64> {
    let (gamma, lambda) = (species.gamma_d1, species.lambda_d1);
    if !(width >= 0.0) {
        return Err(Error::OutOfRange {
            name: "doppler_width",
            value: width,
            range: "[0, ∞)",
        });
    }
    if width == 0.0 {
        return Ok(scattering_rate(intensity, center, gamma, lambda));
    }
    let sigma = convention.sigma(width);
    let norm = 1.0 / (sigma * (2.0 * PI).sqrt());
    let f = |d: f64| {
        let z = (d - center) / sigma;
        scattering_rate(intensity, d, gamma, lambda) * norm * (-0.5 * z * z).exp()
    };
    let (a, b) = (center - 12.0 * sigma, center + 12.0 * sigma);
    let breaks = [center, -gamma, 0.0, gamma];
    Ok(integrate(f, a, b, &breaks, QuadratureOptions::default())?.0)
}

/// Large-detuning limit of the photons scattered per atom during a Stark
/// π pulse: 24πγ/(7Δ₂), independent of τ and Δ_S.
pub fn scattered_photon_limit(species: &SpeciesData) -> f64 {
    let f = species.f_ground as f64;
    48.0 * PI * species.gamma_d1 / ((4.0 * f - 2.0) * species.delta2)
}

/// Occupation of the non-dark states left by off-resonant pumping through
/// the other excited hyperfine level, γΔ_Doppler/Δ₂².
pub fn residual_pump_occupation(species: &SpeciesData) -> f64 {
    species.gamma_d1 * species.doppler_halfwidth / (species.delta2 * species.delta2)
}

/// Transmission and added vacuum fraction after `n` boundaries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryBudget {
    pub transmission: f64,
    pub added_noise_fraction: f64,
}

pub fn boundary_loss_budget(loss: f64, n_boundaries: u32) -> Result<BoundaryBudget> {
    if !(0.0..=1.0).contains(&loss) {
        return Err(Error::OutOfRange {
            name: "boundary_loss",
            value: loss,
            range: "[0, 1]",
        });
    }
    let transmission = (1.0 - loss).powi(n_boundaries as i32);
    Ok(BoundaryBudget {
        transmission,
        added_noise_fraction: 1.0 - transmission,
    })
}
