//! Shared numerical substrate: frequency grids, sampled responses, phase
//! unwrapping, Richardson-extrapolated differentiation, peak finding and
//! adaptive quadrature.

mod grid;
mod peak;
mod phase;
mod quadrature;

pub use grid::{ComplexResponse, FrequencyGrid, MIN_SAMPLES};
pub use peak::locate_peak;
pub use phase::{
    linear_fit, phase_derivative, unwrap_phase, Derivative, LinearFit, UnwrappedPhase,
};
pub use quadrature::integrate;
