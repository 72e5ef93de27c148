use thiserror::Error;

/// Failures raised by the numerical routines.
///
/// Every variant belongs to exactly one subsystem; [`Error::module`] names it so
/// that run summaries can report where a computation broke down.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("transmission amplitude vanishes at sample {index}")]
    ZeroAmplitude { index: usize },
    #[error("phase changes by {jump:.3} rad between samples {index} and {next}; grid too coarse", next = index + 1)]
    UndersampledPhase { index: usize, jump: f64 },
    #[error("derivative point is within {needed} samples of the grid edge")]
    EdgeOfGrid { needed: usize },
    #[error("derivative estimates disagree: {fine} (h) vs {coarse} (2h)")]
    NonConvergent { fine: f64, coarse: f64 },
    #[error("maximum lies on the boundary of the series")]
    PeakAtBoundary,
    #[error("signal is flat")]
    FlatSignal,
    #[error("adaptive quadrature did not reach tolerance (estimated error {estimate:e})")]
    QuadratureFailure { estimate: f64 },

    #[error("energy {energy} is not below the barrier height {v0}")]
    AboveBarrier { energy: f64, v0: f64 },
    #[error("energy must be positive, got {0}")]
    NonPositiveEnergy(f64),

    #[error("detuning {detuning} exceeds the coupled-mode validity limit {limit}")]
    DetuningOutOfRange { detuning: f64, limit: f64 },
    #[error("envelope fit failed: {0}")]
    FitFailure(String),
    #[error("frequency {omega} is not inside a stopband")]
    NotInStopband { omega: f64 },

    #[error("pulse spectrum exceeds the response grid (power {level:e} of peak outside)")]
    SpectrumExceedsGrid { level: f64 },
    #[error("output envelope reaches {level:e} of its peak at the record ends")]
    WraparoundDetected { level: f64 },
    #[error("total probability drifted by {drift:e}")]
    NormDrift { drift: f64 },
    #[error("probability {level:e} reached the grid boundary")]
    BoundaryContamination { level: f64 },
    #[error("synthesis band {band} is narrower than {required}")]
    BandTooNarrow { band: f64, required: f64 },
}

impl Error {
    /// Name of the subsystem that raised the error.
    pub fn module(&self) -> &'static str {
        use Error::*;
        match self {
            InvalidParameter(_) => "parameters",
            ZeroAmplitude { .. }
            | UndersampledPhase { .. }
            | EdgeOfGrid { .. }
            | NonConvergent { .. }
            | PeakAtBoundary
            | FlatSignal
            | QuadratureFailure { .. } => "spectral-core",
            AboveBarrier { .. } | NonPositiveEnergy(_) => "quantum-barrier",
            DetuningOutOfRange { .. } | FitFailure(_) => "photonic-barrier",
            NotInStopband { .. } => "analysis",
            SpectrumExceedsGrid { .. }
            | WraparoundDetected { .. }
            | NormDrift { .. }
            | BoundaryContamination { .. }
            | BandTooNarrow { .. } => "timedomain",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
