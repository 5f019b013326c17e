//! Scenario documents.
//!
//! A scenario is a JSON object whose frequency keys are cyclic (Hz). Missing
//! keys take the cesium defaults below, unknown keys are rejected. The
//! validated [`ScenarioConfig`] holds angular frequencies (rad/s).
//!
//! | key                     | default              |
//! |-------------------------|----------------------|
//! | `omega_b_hz`            | 3.0e5                |
//! | `tau_s`                 | 1.0e-3               |
//! | `rotation_tau_s`        | 3.0e-5               |
//! | `probe_detuning_hz`     | 7.0e8                |
//! | `stark_detuning_hz`     | 3.0e9                |
//! | `microwave_detuning_hz` | 120 × `omega_b_hz`   |
//! | `atom_number`           | 1.0e12               |
//! | `photon_number`         | 1.0e12               |
//! | `beam_area_m2`          | 2.0e-4               |
//! | `atom_density_m3`       | 2.5e16               |
//! | `boundary_loss`         | 0.01                 |
//! | `n_boundaries`          | 2                    |
//! | `feedback_gain`         | unity gain, −1/k_eff |
//! | `signal_variance`       | 1.0                  |
//! | `doppler_width`         | `"hwhm"`             |
//! | `field_conversion`      | `"lande"`            |
//! | `species`               | cesium               |

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decoherence::WidthConvention;
use crate::shifts::{microwave_detuning_default, FieldConversion};
use crate::units::{hz_to_rad, rad_to_hz, SpeciesData};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("malformed scenario document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid value for `{field}`: {reason}")]
    Invalid { field: &'static str, reason: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Per-field species overrides, in the same laboratory units as the
/// top-level document.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_d1_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_d2_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_d1_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_d2_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta_hf_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta2_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g_f: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doppler_halfwidth_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_speed_m_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spin_exchange_cross_section_m2: Option<f64>,
}

/// Raw scenario document as it appears on disk.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioDocument {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega_b_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotation_tau_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probe_detuning_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stark_detuning_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub microwave_detuning_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub photon_number: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beam_area_m2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atom_density_m3: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_loss: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_boundaries: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub feedback_gain: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub signal_variance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub doppler_width: Option<WidthConvention>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field_conversion: Option<FieldConversion>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub species: Option<SpeciesOverrides>,
}

/// Validated scenario in SI units with angular frequencies.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    /// Larmor frequency Ω_B (rad/s)
    pub omega_b: f64,
    /// Read/write pulse duration τ (s); also the quantization time T
    pub pulse_duration: f64,
    /// Duration of the short quadrature-rotation pulse (s)
    pub rotation_pulse_duration: f64,
    /// Probe detuning Δ from the D2 line (rad/s)
    pub probe_detuning: f64,
    /// Stark-field detuning Δ_S from the centre of the D1 F'=3,4 pair (rad/s)
    pub stark_detuning: f64,
    /// Microwave detuning Δ_μ from the hyperfine transition (rad/s)
    pub microwave_detuning: f64,
    /// Atoms per class N_A
    pub atom_number: f64,
    /// Probe photons per pulse N_L
    pub photon_number: f64,
    /// Beam area A (m²)
    pub beam_area: f64,
    /// Density of oppositely polarized atoms ρ (m⁻³)
    pub atom_density: f64,
    /// Loss 𝒜 per boundary crossing
    pub boundary_loss: f64,
    /// Number of boundary crossings per pass
    pub n_boundaries: u32,
    /// Feedback gain; `None` means unity gain −1/k_eff
    pub feedback_gain: Option<f64>,
    /// Per-quadrature variance of the coherent-amplitude ensemble used for
    /// mean fidelities
    pub signal_variance: f64,
    pub doppler_width: WidthConvention,
    pub field_conversion: FieldConversion,
    pub species: SpeciesData,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioDocument::default()
            .validate()
            .expect("defaults are valid")
    }
}

fn positive(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::Invalid {
            field,
            reason: format!("must be positive and finite, got {v}"),
        })
    }
}

fn nonzero(field: &'static str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v != 0.0 {
        Ok(v)
    } else {
        Err(ConfigError::Invalid {
            field,
            reason: format!("must be nonzero and finite, got {v}"),
        })
    }
}

impl ScenarioDocument {
    pub fn validate(&self) -> Result<ScenarioConfig, ConfigError> {
        let omega_b_hz = positive("omega_b_hz", self.omega_b_hz.unwrap_or(3.0e5))?;
        let tau = positive("tau_s", self.tau_s.unwrap_or(1.0e-3))?;
        let rotation_tau = positive("rotation_tau_s", self.rotation_tau_s.unwrap_or(3.0e-5))?;
        let probe = nonzero("probe_detuning_hz", self.probe_detuning_hz.unwrap_or(7.0e8))?;
        let stark = nonzero("stark_detuning_hz", self.stark_detuning_hz.unwrap_or(3.0e9))?;
        let omega_b = hz_to_rad(omega_b_hz);
        let microwave = match self.microwave_detuning_hz {
            Some(v) => hz_to_rad(nonzero("microwave_detuning_hz", v)?),
            None => microwave_detuning_default(omega_b),
        };
        let atom_number = positive("atom_number", self.atom_number.unwrap_or(1.0e12))?;
        let photon_number = positive("photon_number", self.photon_number.unwrap_or(1.0e12))?;
        let beam_area = positive("beam_area_m2", self.beam_area_m2.unwrap_or(2.0e-4))?;
        let atom_density = positive("atom_density_m3", self.atom_density_m3.unwrap_or(2.5e16))?;
        let boundary_loss = self.boundary_loss.unwrap_or(0.01);
        if !(0.0..=1.0).contains(&boundary_loss) {
            return Err(ConfigError::Invalid {
                field: "boundary_loss",
                reason: format!("must lie in [0, 1], got {boundary_loss}"),
            });
        }
        let n_boundaries = self.n_boundaries.unwrap_or(2);
        if n_boundaries % 2 != 0 {
            return Err(ConfigError::Invalid {
                field: "n_boundaries",
                reason: format!("must be even (entry and exit per cell), got {n_boundaries}"),
            });
        }
        if let Some(g) = self.feedback_gain {
            if !g.is_finite() {
                return Err(ConfigError::Invalid {
                    field: "feedback_gain",
                    reason: format!("must be finite, got {g}"),
                });
            }
        }
        let signal_variance = self.signal_variance.unwrap_or(1.0);
        if !(signal_variance.is_finite() && signal_variance >= 0.0) {
            return Err(ConfigError::Invalid {
                field: "signal_variance",
                reason: format!("must be nonnegative, got {signal_variance}"),
            });
        }

        Ok(ScenarioConfig {
            omega_b,
            pulse_duration: tau,
            rotation_pulse_duration: rotation_tau,
            probe_detuning: hz_to_rad(probe),
            stark_detuning: hz_to_rad(stark),
            microwave_detuning: microwave,
            atom_number,
            photon_number,
            beam_area,
            atom_density,
            boundary_loss,
            n_boundaries,
            feedback_gain: self.feedback_gain,
            signal_variance,
            doppler_width: self.doppler_width.unwrap_or_default(),
            field_conversion: self.field_conversion.unwrap_or_default(),
            species: self.species.clone().unwrap_or_default().apply(SpeciesData::cesium())?,
        })
    }
}

impl SpeciesOverrides {
    fn apply(&self, mut s: SpeciesData) -> Result<SpeciesData, ConfigError> {
        macro_rules! set {
            ($src:ident, $dst:ident, $name:literal, $conv:expr) => {
                if let Some(v) = self.$src {
                    s.$dst = $conv(positive($name, v)?);
                }
            };
        }
        let id = |v: f64| v;
        set!(lambda_d1_m, lambda_d1, "species.lambda_d1_m", id);
        set!(lambda_d2_m, lambda_d2, "species.lambda_d2_m", id);
        set!(gamma_d1_hz, gamma_d1, "species.gamma_d1_hz", hz_to_rad);
        set!(gamma_d2_hz, gamma_d2, "species.gamma_d2_hz", hz_to_rad);
        set!(delta_hf_hz, delta_hf, "species.delta_hf_hz", hz_to_rad);
        set!(delta2_hz, delta2, "species.delta2_hz", hz_to_rad);
        set!(g_f, g_f, "species.g_f", id);
        set!(doppler_halfwidth_hz, doppler_halfwidth, "species.doppler_halfwidth_hz", hz_to_rad);
        set!(mean_speed_m_s, mean_speed, "species.mean_speed_m_s", id);
        set!(
            spin_exchange_cross_section_m2,
            spin_exchange_cross_section,
            "species.spin_exchange_cross_section_m2",
            id
        );
        Ok(s)
    }
}

impl ScenarioConfig {
    /// Fully populated document equivalent to this configuration.
    pub fn to_document(&self) -> ScenarioDocument {
        let s = &self.species;
        ScenarioDocument {
            omega_b_hz: Some(rad_to_hz(self.omega_b)),
            tau_s: Some(self.pulse_duration),
            rotation_tau_s: Some(self.rotation_pulse_duration),
            probe_detuning_hz: Some(rad_to_hz(self.probe_detuning)),
            stark_detuning_hz: Some(rad_to_hz(self.stark_detuning)),
            microwave_detuning_hz: Some(rad_to_hz(self.microwave_detuning)),
            atom_number: Some(self.atom_number),
            photon_number: Some(self.photon_number),
            beam_area_m2: Some(self.beam_area),
            atom_density_m3: Some(self.atom_density),
            boundary_loss: Some(self.boundary_loss),
            n_boundaries: Some(self.n_boundaries),
            feedback_gain: self.feedback_gain,
            signal_variance: Some(self.signal_variance),
            doppler_width: Some(self.doppler_width),
            field_conversion: Some(self.field_conversion),
            species: Some(SpeciesOverrides {
                lambda_d1_m: Some(s.lambda_d1),
                lambda_d2_m: Some(s.lambda_d2),
                gamma_d1_hz: Some(rad_to_hz(s.gamma_d1)),
                gamma_d2_hz: Some(rad_to_hz(s.gamma_d2)),
                delta_hf_hz: Some(rad_to_hz(s.delta_hf)),
                delta2_hz: Some(rad_to_hz(s.delta2)),
                g_f: Some(s.g_f),
                doppler_halfwidth_hz: Some(rad_to_hz(s.doppler_halfwidth)),
                mean_speed_m_s: Some(s.mean_speed),
                spin_exchange_cross_section_m2: Some(s.spin_exchange_cross_section),
            }),
        }
    }
}

/// Parse and validate a scenario document.
pub fn load_scenario(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let doc: ScenarioDocument = serde_json::from_str(text)?;
    doc.validate()
}

pub fn load_scenario_file(path: impl AsRef<Path>) -> Result<ScenarioConfig, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_scenario(&text)
}
