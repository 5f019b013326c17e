//! Frequency ladders of the F = 4 ground level and the pulses built on them.
//!
//! A ladder stores Ω(m) = [E(m+1) − E(m)]/ħ for m = −F … F−1, the precession
//! frequency of the coherence between neighbouring sublevels. Class 1 lives
//! on Ω(−F) and class 2 on Ω(F−1); their difference is what dephases (or
//! deliberately rotates) the two atomic modes against each other.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::decoherence::{doppler_averaged_scattering, stark_scattering_detuning, DecoherenceBudget, WidthConvention};
use crate::error::{Error, Result};
use crate::units::{SpeciesData, CODATA};

/// Relative guard band around the |Δ_S| = Δ₂/2 pole of the Stark ladder.
pub const STARK_POLE_GUARD: f64 = 1e-6;

/// How a Larmor frequency is turned into a magnetic field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldConversion {
    /// B = ħΩ_B/(g_F μ_B)
    #[default]
    Lande,
    /// B = ħΩ_B/μ_B
    Literal,
}

impl FieldConversion {
    /// Magnetic field (T) that produces Larmor frequency `omega_b`.
    pub fn field_for(self, omega_b: f64, species: &SpeciesData) -> f64 {
        let g = match self {
            FieldConversion::Lande => species.g_f,
            FieldConversion::Literal => 1.0,
        };
        CODATA.hbar * omega_b / (g * CODATA.mu_bohr)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftMechanism {
    QuadraticZeeman,
    AcStark,
    AcZeeman,
    /// Sum of several ladders acting together.
    Composite,
}

/// What produced a ladder. Intensities in W/m², frequencies in rad/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderParams {
    QuadraticZeeman { omega_b: f64 },
    AcStark { intensity: f64, delta_s: f64 },
    AcZeeman { intensity: f64, delta_mu: f64 },
    Composite(Vec<LadderParams>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShiftLadder {
    pub mechanism: ShiftMechanism,
    pub params: LadderParams,
    /// `(m, Ω(m))` for m = −F … F−1, ascending in m.
    pub omegas: Vec<(i32, f64)>,
}

impl ShiftLadder {
    fn from_fn(mechanism: ShiftMechanism, params: LadderParams, species: &SpeciesData, f: impl Fn(i32) -> f64) -> Self {
        ShiftLadder {
            mechanism,
            params,
            omegas: species.ladder_indices().map(|m| (m, f(m))).collect(),
        }
    }

    pub fn omega(&self, m: i32) -> Option<f64> {
        self.omegas.iter().find(|&&(k, _)| k == m).map(|&(_, w)| w)
    }

    /// Ω(F−1) − Ω(−F): the frequency of class 2 relative to class 1.
    pub fn class_difference(&self) -> f64 {
        self.omegas.last().map_or(0.0, |l| l.1) - self.omegas.first().map_or(0.0, |f| f.1)
    }

    /// max Ω − min Ω over the ladder.
    pub fn spread(&self) -> f64 {
        let (lo, hi) = self
            .omegas
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(_, w)| (lo.min(w), hi.max(w)));
        if self.omegas.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// Least-squares fit Ω(m) ≈ a + b(2m+1); returns `(a, b, max residual)`.
    pub fn affine_fit(&self) -> (f64, f64, f64) {
        let n = self.omegas.len() as f64;
        let xs: Vec<f64> = self.omegas.iter().map(|&(m, _)| (2 * m + 1) as f64).collect();
        let ys: Vec<f64> = self.omegas.iter().map(|&(_, w)| w).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let a = my - b * mx;
        let resid = xs
            .iter()
            .zip(&ys)
            .map(|(x, y)| (y - a - b * x).abs())
            .fold(0.0, f64::max);
        (a, b, resid)
    }

    /// Pointwise sum of two ladders over the same m range.
    pub fn compose(&self, other: &ShiftLadder) -> Result<ShiftLadder> {
        if self.omegas.len() != other.omegas.len() {
            return Err(Error::DimensionMismatch {
                expected: self.omegas.len(),
                found: other.omegas.len(),
            });
        }
        let mut parts = Vec::new();
        for p in [&self.params, &other.params] {
            match p {
                LadderParams::Composite(inner) => parts.extend(inner.iter().cloned()),
                single => parts.push(single.clone()),
            }
        }
        Ok(ShiftLadder {
            mechanism: ShiftMechanism::Composite,
            params: LadderParams::Composite(parts),
            omegas: self
                .omegas
                .iter()
                .zip(&other.omegas)
                .map(|(&(m, a), &(_, b))| (m, a + b))
                .collect(),
        })
    }
}

fn ladder_width(species: &SpeciesData) -> f64 {
    // Ω(−F) − Ω(F−1) in units of the (2m+1) slope
    (4 * species.f_ground as i32 - 2) as f64
}

/// Quadratic Zeeman ladder Ω_Z(m) = Ω_B − (Ω_B²/Δ_HF)(2m+1).
pub fn zeeman_ladder(omega_b: f64, species: &SpeciesData) -> Result<ShiftLadder> {
    if !(omega_b >= 0.0) {
        return Err(Error::OutOfRange {
            name: "omega_b",
            value: omega_b,
            range: "[0, ∞)",
        });
    }
    let curv = omega_b * omega_b / species.delta_hf;
    Ok(ShiftLadder::from_fn(
        ShiftMechanism::QuadraticZeeman,
        LadderParams::QuadraticZeeman { omega_b },
        species,
        |m| omega_b - curv * (2 * m + 1) as f64,
    ))
}

/// Phase accumulated between the two classes by the quadratic Zeeman
/// effect alone over `tau`.
pub fn class_dephasing(omega_b: f64, tau: f64, species: &SpeciesData) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::OutOfRange {
            name: "tau",
            value: tau,
            range: "[0, ∞)",
        });
    }
    Ok(zeeman_ladder(omega_b, species)?.class_difference().abs() * tau)
}

fn check_stark_pole(delta_s: f64, species: &SpeciesData) -> Result<()> {
    let half = species.delta2 / 2.0;
    if delta_s == 0.0 && half == 0.0 || (delta_s.abs() - half).abs() <= STARK_POLE_GUARD * half {
        return Err(Error::StarkPole { delta_s });
    }
    Ok(())
}

/// Prefactor λ³γI/(2⁸π²ħc) of the D1 Stark shift, in rad/s · rad/s.
fn stark_strength(intensity: f64, species: &SpeciesData) -> f64 {
    species.lambda_d1.powi(3) * species.gamma_d1 * intensity / (256.0 * PI * PI * CODATA.hbar * CODATA.c)
}

/// Ladder of a π-polarized field detuned by `delta_s` from the centre of
/// the two D1 hyperfine components.
pub fn stark_ladder(intensity: f64, delta_s: f64, species: &SpeciesData) -> Result<ShiftLadder> {
    check_stark_pole(delta_s, species)?;
    let d2 = species.delta2;
    let slope = stark_strength(intensity, species) * d2 / (delta_s * delta_s - d2 * d2 / 4.0);
    Ok(ShiftLadder::from_fn(
        ShiftMechanism::AcStark,
        LadderParams::AcStark { intensity, delta_s },
        species,
        |m| slope * (2 * m + 1) as f64,
    ))
}

/// Stark energies E_S(m)/ħ (rad/s) for m = −F … F.
///
/// The F'=3 component couples with weight (F−m)(F+m) at detuning
/// Δ_S + Δ₂/2, the F'=4 component with weight m² at Δ_S − Δ₂/2.
pub fn stark_energies(intensity: f64, delta_s: f64, species: &SpeciesData) -> Result<Vec<(i32, f64)>> {
    check_stark_pole(delta_s, species)?;
    let f = species.f_ground as f64;
    let k = stark_strength(intensity, species);
    let d3 = delta_s + species.delta2 / 2.0;
    let d4 = delta_s - species.delta2 / 2.0;
    Ok(species
        .sublevels()
        .map(|m| {
            let m2 = (m * m) as f64;
            (m, k * ((f * f - m2) / d3 + m2 / d4))
        })
        .collect())
}

/// Intensity of the Stark field whose ladder cancels the quadratic Zeeman
/// ladder at `omega_b`.
pub fn stark_compensation_intensity(omega_b: f64, delta_s: f64, species: &SpeciesData) -> Result<f64> {
    check_stark_pole(delta_s, species)?;
    let d2 = species.delta2;
    if delta_s.abs() <= d2 / 2.0 {
        return Err(Error::DetuningRegime { delta_s });
    }
    Ok(256.0 * PI * PI * CODATA.hbar * CODATA.c * omega_b * omega_b
        / (species.lambda_d1.powi(3) * species.gamma_d1 * species.delta_hf)
        * (delta_s * delta_s / d2 - d2 / 4.0))
}

/// Slope Iμ_B²/(2ε₀ħ²c³Δ_μ F²) of the ac Zeeman ladder in (2m+1).
fn ac_zeeman_slope(intensity: f64, delta_mu: f64, species: &SpeciesData) -> f64 {
    let f2 = (species.f_ground * species.f_ground) as f64;
    intensity * CODATA.mu_bohr.powi(2) / (2.0 * CODATA.epsilon0 * CODATA.hbar.powi(2) * CODATA.c.powi(3) * delta_mu * f2)
}

/// Ladder of a π-polarized microwave detuned by `delta_mu` above the
/// m → m hyperfine transitions.
pub fn ac_zeeman_ladder(intensity: f64, delta_mu: f64, species: &SpeciesData) -> Result<ShiftLadder> {
    if delta_mu == 0.0 {
        return Err(Error::ZeroDetuning("delta_mu"));
    }
    let slope = ac_zeeman_slope(intensity, delta_mu, species);
    Ok(ShiftLadder::from_fn(
        ShiftMechanism::AcZeeman,
        LadderParams::AcZeeman { intensity, delta_mu },
        species,
        |m| slope * (2 * m + 1) as f64,
    ))
}

/// ac Zeeman energies E_μ(m)/ħ (rad/s) of the upper ground level for
/// m = −F … F. The edge states have no m → m partner and do not shift.
pub fn ac_zeeman_energies(intensity: f64, delta_mu: f64, species: &SpeciesData) -> Result<Vec<(i32, f64)>> {
    if delta_mu == 0.0 {
        return Err(Error::ZeroDetuning("delta_mu"));
    }
    let f2 = (species.f_ground * species.f_ground) as f64;
    let k = ac_zeeman_slope(intensity, delta_mu, species) * f2;
    Ok(species
        .sublevels()
        .map(|m| (m, -k * (1.0 - (m * m) as f64 / f2)))
        .collect())
}

/// Microwave intensity whose ladder cancels the quadratic Zeeman ladder.
pub fn ac_zeeman_compensation_intensity(omega_b: f64, delta_mu: f64, species: &SpeciesData) -> Result<f64> {
    if !(delta_mu > 0.0) {
        return Err(Error::MicrowaveSign(delta_mu));
    }
    let f2 = (species.f_ground * species.f_ground) as f64;
    Ok(2.0 * f2 * CODATA.epsilon0 * CODATA.hbar.powi(2) * CODATA.c.powi(3) * delta_mu * omega_b * omega_b
        / (species.delta_hf * CODATA.mu_bohr.powi(2)))
}

/// Microwave detuning ten times the spread 12Ω_B of the m → m hyperfine
/// transition frequencies.
pub fn microwave_detuning_default(omega_b: f64) -> f64 {
    10.0 * 12.0 * omega_b
}

/// What the pulse needs from the lab.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PulseDrive {
    /// Larmor frequency (rad/s) and the bias field (T) that gives it.
    Magnetic { omega_b: f64, field: f64 },
    /// Field intensity in W/m².
    Intensity(f64),
}

/// A pulse that rotates class 2 by π relative to class 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseDesign {
    pub mechanism: ShiftMechanism,
    pub duration: f64,
    pub drive: PulseDrive,
    /// |Ω(F−1) − Ω(−F)|·duration
    pub achieved_phase_difference: f64,
    pub ladder: ShiftLadder,
    pub side_effects: Option<DecoherenceBudget>,
}

fn require_duration(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "tau",
            value: tau,
            range: "(0, ∞)",
        })
    }
}

/// Bias field strong enough that the quadratic Zeeman effect alone gives a
/// π differential phase in `tau`.
pub fn zeeman_pi_pulse(tau: f64, species: &SpeciesData, conversion: FieldConversion) -> Result<PulseDesign> {
    require_duration(tau)?;
    let omega_b = (PI * species.delta_hf / (ladder_width(species) * tau)).sqrt();
    let ladder = zeeman_ladder(omega_b, species)?;
    Ok(PulseDesign {
        mechanism: ShiftMechanism::QuadraticZeeman,
        duration: tau,
        drive: PulseDrive::Magnetic {
            omega_b,
            field: conversion.field_for(omega_b, species),
        },
        achieved_phase_difference: ladder.class_difference().abs() * tau,
        ladder,
        side_effects: None,
    })
}

/// Stark field giving a π differential phase in `tau`, with the photon
/// scattering it causes during the pulse.
pub fn stark_pi_pulse(
    tau: f64,
    delta_s: f64,
    species: &SpeciesData,
    width: WidthConvention,
) -> Result<PulseDesign> {
    require_duration(tau)?;
    check_stark_pole(delta_s, species)?;
    let d2 = species.delta2;
    let intensity = 256.0 * PI.powi(3) * CODATA.hbar * CODATA.c * (delta_s * delta_s - d2 * d2 / 4.0).abs()
        / (ladder_width(species) * species.lambda_d1.powi(3) * species.gamma_d1 * d2 * tau);
    let ladder = stark_ladder(intensity, delta_s, species)?;
    let gamma_ph = doppler_averaged_scattering(
        intensity,
        stark_scattering_detuning(delta_s, species),
        species.doppler_halfwidth,
        width,
        species,
    )?;
    Ok(PulseDesign {
        mechanism: ShiftMechanism::AcStark,
        duration: tau,
        drive: PulseDrive::Intensity(intensity),
        achieved_phase_difference: ladder.class_difference().abs() * tau,
        ladder,
        side_effects: Some(DecoherenceBudget {
            gamma_ph,
            n_phot: gamma_ph * tau,
            ..DecoherenceBudget::lossless()
        }),
    })
}

/// Microwave intensity giving a π differential phase in `tau`.
pub fn microwave_pi_pulse(tau: f64, delta_mu: f64, species: &SpeciesData) -> Result<PulseDesign> {
    require_duration(tau)?;
    if delta_mu == 0.0 {
        return Err(Error::ZeroDetuning("delta_mu"));
    }
    let f2 = (species.f_ground * species.f_ground) as f64;
    let intensity = 2.0 * PI * f2 * CODATA.epsilon0 * CODATA.hbar.powi(2) * CODATA.c.powi(3) * delta_mu.abs()
        / (ladder_width(species) * CODATA.mu_bohr.powi(2) * tau);
    let ladder = ac_zeeman_ladder(intensity, delta_mu, species)?;
    Ok(PulseDesign {
        mechanism: ShiftMechanism::AcZeeman,
        duration: tau,
        drive: PulseDrive::Intensity(intensity),
        achieved_phase_difference: ladder.class_difference().abs() * tau,
        ladder,
        side_effects: None,
    })
}
