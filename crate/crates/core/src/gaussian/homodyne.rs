use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{GaussianState, Mode, Quadrature};
use crate::error::Result;

/// Variances below this are treated as sharp (pseudo-inverse → 0).
const SHARP_VARIANCE: f64 = 1e-12;

/// How the homodyne record is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Outcome {
    /// The record equals the current mean. Conditioning then leaves every
    /// mean unchanged, which is what transfer-map extraction needs.
    Mean,
    /// One Gaussian draw from a ChaCha8 stream seeded with the value.
    Sample(u64),
    /// A caller-supplied record.
    Given(f64),
}

/// What happens to the measured mode afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MeasuredMode {
    #[default]
    Remove,
    ResetToVacuum,
}

/// Measures one quadrature and conditions the remaining modes on the record.
///
/// Uses the Gaussian conditional rule: for record x of a quadrature with
/// mean μ and variance σ², every other phase-space row r gets
/// `μ_r += V_rq (x − μ)/σ²` and the covariance loses `V_·q V_qᵀ/σ²`.
pub fn homodyne_condition(
    state: &GaussianState,
    mode: Mode,
    quadrature: Quadrature,
    outcome: Outcome,
    after: MeasuredMode,
) -> Result<(GaussianState, f64)> {
    let k = state.quadrature_index(mode, quadrature)?;
    let mean = state.means()[k];
    let var = state.cov()[(k, k)];
    let value = match outcome {
        Outcome::Mean => mean,
        Outcome::Given(x) => x,
        Outcome::Sample(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sd = var.max(0.0).sqrt();
            if sd == 0.0 {
                mean
            } else {
                Normal::new(mean, sd).expect("finite variance").sample(&mut rng)
            }
        }
    };

    let inv = if var > SHARP_VARIANCE { 1.0 / var } else { 0.0 };
    let column = state.cov().column(k).into_owned();
    let means = state.means() + &column * ((value - mean) * inv);
    let cov = state.cov() - &column * column.transpose() * inv;
    let conditioned = GaussianState::from_moments(state.modes(), state.basis(), means, cov)?;

    let out = match after {
        MeasuredMode::ResetToVacuum => conditioned.reset_to_vacuum(mode)?,
        MeasuredMode::Remove => {
            let keep: Vec<Mode> = state.modes().iter().copied().filter(|&m| m != mode).collect();
            conditioned.reduce(&keep)?
        }
    };
    Ok((out, value))
}
