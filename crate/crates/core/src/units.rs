//! Physical constants, cesium line data and unit conversions.
//!
//! Everything inside the crate is strict SI with angular frequencies in
//! rad/s. Conversions to the laboratory units used in reports (cyclic Hz,
//! mW/cm², W/cm², Gauss) live here so the rest of the code never has to
//! think about them.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalConstants {
    /// Reduced Planck constant (J·s)
    pub hbar: f64,
    /// Speed of light (m/s)
    pub c: f64,
    /// Vacuum permittivity (F/m)
    pub epsilon0: f64,
    /// Bohr magneton (J/T)
    pub mu_bohr: f64,
}

pub const CODATA: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    epsilon0: 8.854_187_812_8e-12,
    mu_bohr: 9.274_010_078_3e-24,
};

/// Line data for the alkali species held in the cell.
///
/// Only cesium is shipped. Individual fields can be overridden from a
/// scenario document.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeciesData {
    /// D1 wavelength (m)
    pub lambda_d1: f64,
    /// D2 wavelength (m)
    pub lambda_d2: f64,
    /// D1 natural linewidth (rad/s)
    pub gamma_d1: f64,
    /// D2 natural linewidth (rad/s)
    pub gamma_d2: f64,
    /// Ground-state hyperfine splitting (rad/s)
    pub delta_hf: f64,
    /// Excited D1 hyperfine splitting F'=3 ↔ F'=4 (rad/s)
    pub delta2: f64,
    /// Total angular momentum of the working ground level
    pub f_ground: u32,
    /// Landé factor of the working ground level
    pub g_f: f64,
    /// Doppler half-width of the room-temperature vapor (rad/s)
    pub doppler_halfwidth: f64,
    /// Mean thermal speed (m/s)
    pub mean_speed: f64,
    /// Electron spin-exchange cross section (m²)
    pub spin_exchange_cross_section: f64,
}

impl SpeciesData {
    pub const fn cesium() -> Self {
        SpeciesData {
            lambda_d1: 894.6e-9,
            lambda_d2: 852.3e-9,
            gamma_d1: TAU * 4.56e6,
            gamma_d2: TAU * 5.22e6,
            delta_hf: TAU * 9.19e9,
            delta2: TAU * 1168.0e6,
            f_ground: 4,
            g_f: 0.25,
            doppler_halfwidth: TAU * 190.0e6,
            mean_speed: 130.0,
            spin_exchange_cross_section: 2.0e-18,
        }
    }

    /// Magnetic quantum numbers `m = -F ..= F-1` that label the ladder of
    /// neighbouring-level spacings.
    pub fn ladder_indices(&self) -> impl Iterator<Item = i32> + Clone {
        let f = self.f_ground as i32;
        -f..f
    }

    /// Magnetic quantum numbers `m = -F ..= F`.
    pub fn sublevels(&self) -> impl Iterator<Item = i32> + Clone {
        let f = self.f_ground as i32;
        -f..=f
    }
}

impl Default for SpeciesData {
    fn default() -> Self {
        Self::cesium()
    }
}

#[inline]
pub fn hz_to_rad(f: f64) -> f64 {
    TAU * f
}

#[inline]
pub fn rad_to_hz(omega: f64) -> f64 {
    omega / TAU
}

#[inline]
pub fn w_per_m2_to_mw_per_cm2(i: f64) -> f64 {
    i * 0.1
}

#[inline]
pub fn mw_per_cm2_to_w_per_m2(i: f64) -> f64 {
    i * 10.0
}

#[inline]
pub fn w_per_m2_to_w_per_cm2(i: f64) -> f64 {
    i * 1.0e-4
}

#[inline]
pub fn w_per_cm2_to_w_per_m2(i: f64) -> f64 {
    i * 1.0e4
}

#[inline]
pub fn tesla_to_gauss(b: f64) -> f64 {
    b * 1.0e4
}

#[inline]
pub fn gauss_to_tesla(b: f64) -> f64 {
    b * 1.0e-4
}

/// Vacuum electric field squared E₀² = ħω₀ / (2ε₀ A c T) of a pulse with
/// transverse area `area` (m²), duration `duration` (s) and wavelength
/// `wavelength` (m).
pub fn vacuum_field_squared(area: f64, duration: f64, wavelength: f64) -> f64 {
    let omega0 = TAU * CODATA.c / wavelength;
    CODATA.hbar * omega0 / (2.0 * CODATA.epsilon0 * area * CODATA.c * duration)
}

/// Optical dipole element squared μ₀² = 3ε₀ħλ³γ / (2π²) for a line of
/// natural width `gamma` (rad/s).
pub fn dipole_moment_squared(gamma: f64, wavelength: f64) -> f64 {
    3.0 * CODATA.epsilon0 * CODATA.hbar * wavelength.powi(3) * gamma / (2.0 * PI * PI)
}

/// Saturation intensity I_sat = 2π²ħcγ / (3λ³) (W/m²).
pub fn saturation_intensity(gamma: f64, wavelength: f64) -> f64 {
    2.0 * PI * PI * CODATA.hbar * CODATA.c * gamma / (3.0 * wavelength.powi(3))
}
