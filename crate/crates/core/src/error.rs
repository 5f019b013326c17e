use thiserror::Error;

use crate::gaussian::{AtomicBasis, Mode};

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode {0:?} is not present in the state")]
    UnknownMode(Mode),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symplectic (residual {0:e})")]
    NotSymplectic(f64),

    #[error("quadratic form is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("state is in the {found:?} basis, operation requires {expected:?}")]
    WrongBasis {
        expected: AtomicBasis,
        found: AtomicBasis,
    },

    #[error("mode {mode:?} does not belong to the {basis:?} basis")]
    ModeBasisConflict { mode: Mode, basis: AtomicBasis },

    #[error("duplicate mode {0:?}")]
    DuplicateMode(Mode),

    #[error("{name} = {value} is outside {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("detuning {0} must be nonzero")]
    ZeroDetuning(&'static str),

    #[error("stark detuning {delta_s:e} rad/s sits on the |Δ_S| = Δ_2/2 pole")]
    StarkPole { delta_s: f64 },

    #[error("stark detuning {delta_s:e} rad/s must satisfy |Δ_S| > Δ_2/2 to cancel the quadratic Zeeman shift")]
    DetuningRegime { delta_s: f64 },

    #[error("microwave detuning {0:e} rad/s must be positive to cancel the quadratic Zeeman shift")]
    MicrowaveSign(f64),

    #[error("explicit Euler step unstable: dt * max_rate = {0} (limit 0.1)")]
    StepUnstable(f64),

    #[error("adaptive quadrature did not converge (estimate {estimate:e}, error {error:e})")]
    QuadratureNonConvergence { estimate: f64, error: f64 },

    #[error("invalid population vector: {0}")]
    InvalidPopulations(String),
}

pub type Result<T> = std::result::Result<T, Error>;
