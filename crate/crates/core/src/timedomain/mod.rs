//! Time-domain validation: spectral synthesis of pulses through photonic
//! barriers, the signal-front test, and a Crank–Nicolson integrator of the
//! Schrödinger equation used as an independent check on the quantum delays.
//!
//! Envelopes follow the `exp(−iωt)` convention: `A(t) = ∫ Ã(Ω) e^{−iΩt} dΩ`,
//! so a delay `τ` multiplies the spectrum by `e^{iΩτ}`.

mod front;
mod pulse;
mod tdse;

pub use front::{front_causality, FrontRamp, FrontTestResult, MIN_BAND_FACTOR};
pub use pulse::{propagate_spectral, PropagationResult, PulseEnvelope};
pub use tdse::{tdse_delay, tdse_oracle, TdseMeasurement, WavePacket};
