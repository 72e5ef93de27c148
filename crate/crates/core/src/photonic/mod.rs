//! One-dimensional photonic barriers: lossless layered stacks via characteristic
//! matrices and uniform Bragg gratings via coupled modes.
//!
//! Units: `c = 1`, vacuum impedance 1, normal incidence, time dependence
//! `exp(−iωt)`. Fields are normalized to unit input power, so stored energy per
//! unit input power is a time.

mod energy;
mod grating;
#[cfg(test)]
mod oracle;
mod stack;

pub use energy::{
    penetration_depth, phase_energy_check, reconstruct_fields, stopband, stored_energy,
    EnergyReport, FieldProfile, PhaseEnergyReport, Stopband, MAX_BAND_FRACTION,
    MIN_POINTS_PER_LAYER,
};
pub use grating::{grating_response, UniformGrating};
pub use stack::{stack_response, CharMatrix, Layer, LayeredStack};

use crate::error::Result;
use crate::spectral::{phase_derivative, unwrap_phase, FrequencyGrid, UnwrappedPhase};

/// Unwrapped transmission phase of the stack on `grid`.
pub fn stack_phase(stack: &LayeredStack, grid: &FrequencyGrid) -> Result<UnwrappedPhase> {
    unwrap_phase(&stack_response(stack, grid))
}

/// Step used to differentiate a stack's phase at `omega`: small against both the
/// carrier and the inverse optical path.
fn derivative_step(optical_length: f64, omega: f64) -> f64 {
    let by_carrier = 2.5e-6 * omega;
    if optical_length > 0.0 {
        by_carrier.min(2.5e-4 / optical_length)
    } else {
        by_carrier
    }
}

/// Transmission group delay `d(arg t)/dω` of the stack.
pub fn group_delay(stack: &LayeredStack, omega: f64) -> Result<f64> {
    let optical: f64 = stack.layers().iter().map(|l| l.n * l.d).sum();
    let h = derivative_step(optical, omega);
    let grid = FrequencyGrid::centered(omega, 4.0 * h, 9)?;
    Ok(phase_derivative(&stack_phase(stack, &grid)?, 0.0)?.value)
}

/// Group delay of the grating's closed-form response.
pub fn grating_group_delay(grating: &UniformGrating, omega: f64) -> Result<f64> {
    let optical = grating.n_bar() * grating.length();
    let h = derivative_step(optical, omega);
    let grid = FrequencyGrid::centered(omega, 4.0 * h, 9)?;
    let phase = unwrap_phase(&grating_response(grating, &grid)?)?;
    Ok(phase_derivative(&phase, 0.0)?.value)
}
