use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stack::{CharMatrix, Layer, LayeredStack};
use super::stack_phase;
use crate::error::{invalid, Error, Result};
use crate::spectral::{integrate, linear_fit, FrequencyGrid, LinearFit};

/// Minimum field samples per layer in a [`FieldProfile`].
pub const MIN_POINTS_PER_LAYER: usize = 32;
const ENERGY_TOL: f64 = 1e-12;
/// Linear-fit quality below which an envelope is not treated as decaying.
const MIN_FIT_R2: f64 = 0.95;

/// Fields `(E, H)` normalized to unit input power.
///
/// Each layer is sampled from its entry to its exit inclusive, so interface
/// positions appear twice, once from each side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldProfile {
    pub z: Vec<f64>,
    pub e: Vec<Complex64>,
    pub h: Vec<Complex64>,
    /// Layer index of every sample.
    pub layer: Vec<usize>,
}

/// Incident amplitude giving unit power, `P = n|a|²/2`.
fn unit_power_amplitude(n_in: f64) -> f64 {
    (2.0 / n_in).sqrt()
}

/// Exit-plane fields `(z_exit, E, H)` of every layer, found by walking the transmitted wave backwards.
fn back_propagate(stack: &LayeredStack, omega: f64) -> Vec<(f64, Complex64, Complex64)> {
    let (t, _) = stack.field_amplitudes(omega);
    let a = unit_power_amplitude(stack.n_in());
    let mut e = t * a;
    let mut h = e * stack.n_out();
    let mut z = stack.total_length();
    let mut exits = vec![(0.0, e, h); stack.layers().len()];
    for (j, layer) in stack.layers().iter().enumerate().rev() {
        exits[j] = (z, e, h);
        (e, h) = field_in_layer(layer, omega, e, h, layer.d);
        z -= layer.d;
    }
    exits
}

/// Fields a distance `back` before the exit of `layer`, given the exit fields.
fn field_in_layer(
    layer: &Layer,
    omega: f64,
    e: Complex64,
    h: Complex64,
    back: f64,
) -> (Complex64, Complex64) {
    let inverse = CharMatrix::layer(
        &Layer {
            n: layer.n,
            d: -back,
        },
        omega,
    );
    inverse.apply(e, h)
}

fn density(n: f64, e: Complex64, h: Complex64) -> f64 {
    0.25 * (n * n * e.norm_sqr() + h.norm_sqr())
}

/// Samples the field through the stack at `points_per_layer` positions per layer.
pub fn reconstruct_fields(
    stack: &LayeredStack,
    omega: f64,
    points_per_layer: usize,
) -> Result<FieldProfile> {
    if points_per_layer < MIN_POINTS_PER_LAYER {
        return Err(invalid(format!(
            "need at least {MIN_POINTS_PER_LAYER} samples per layer"
        )));
    }
    let fields = back_propagate(stack, omega);
    let mut profile = FieldProfile {
        z: vec![],
        e: vec![],
        h: vec![],
        layer: vec![],
    };
    for (j, (layer, &(z_exit, e1, h1))) in stack.layers().iter().zip(&fields).enumerate() {
        for p in 0..points_per_layer {
            let back = layer.d * (1.0 - p as f64 / (points_per_layer - 1) as f64);
            let (e, h) = field_in_layer(layer, omega, e1, h1, back);
            profile.z.push(z_exit - back);
            profile.e.push(e);
            profile.h.push(h);
            profile.layer.push(j);
        }
    }
    Ok(profile)
}

impl FieldProfile {
    /// Largest jump of `E` or `H` between the two samples of each interface.
    pub fn continuity_residual(&self) -> f64 {
        (1..self.z.len())
            .filter(|&k| self.layer[k] != self.layer[k - 1])
            .map(|k| {
                (self.e[k] - self.e[k - 1])
                    .norm()
                    .max((self.h[k] - self.h[k - 1]).norm())
            })
            .fold(0.0, f64::max)
    }
}

/// Stored energy per unit input power and the shape of its density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    /// `U/P_in`; a time, since `c = 1`.
    pub u_per_pin: f64,
    pub z: Vec<f64>,
    pub density: Vec<f64>,
    /// Field 1/e depth `ℓ`: the density envelope falls as `exp(−2z/ℓ)`.
    /// Absent when the envelope is not decaying.
    pub penetration_depth: Option<f64>,
    /// Energy per unit power of the same length of vacuum.
    pub free_space_u_per_pin: f64,
}

/// Integrates `(n²|E|² + |H|²)/4` through the stack for unit input power.
pub fn stored_energy(stack: &LayeredStack, omega: f64) -> Result<EnergyReport> {
    let fields = back_propagate(stack, omega);
    let per_layer = stack
        .layers()
        .iter()
        .zip(&fields)
        .map(|(layer, &(_, e1, h1))| {
            integrate(
                |s| {
                    let (e, h) = field_in_layer(layer, omega, e1, h1, s);
                    density(layer.n, e, h)
                },
                0.0,
                layer.d,
                ENERGY_TOL,
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    let u_per_pin = per_layer.iter().sum();

    let profile = reconstruct_fields(stack, omega, MIN_POINTS_PER_LAYER)?;
    let density_samples = profile
        .e
        .iter()
        .zip(&profile.h)
        .zip(&profile.layer)
        .map(|((&e, &h), &j)| density(stack.layers()[j].n, e, h))
        .collect();

    Ok(EnergyReport {
        u_per_pin,
        z: profile.z,
        density: density_samples,
        penetration_depth: penetration_depth(stack, &per_layer).ok(),
        free_space_u_per_pin: stack.total_length(),
    })
}

/// Log-linear fit of the per-layer mean density over the front half of the stack.
///
/// Adjacent layer means are combined geometrically first, which removes the
/// alternating offset between high- and low-index layers of a periodic stack.
pub fn penetration_depth(stack: &LayeredStack, layer_energy: &[f64]) -> Result<f64> {
    let half = 0.5 * stack.total_length();
    let mut z = 0.0;
    let mut centers = vec![];
    let mut logs = vec![];
    for (layer, &u) in stack.layers().iter().zip(layer_energy) {
        if z >= half {
            break;
        }
        centers.push(z + 0.5 * layer.d);
        logs.push((u / layer.d).ln());
        z += layer.d;
    }
    if logs.len() < 3 {
        return Err(Error::FitFailure(
            "fewer than three layers in the front half".into(),
        ));
    }
    let xs: Vec<f64> = centers.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let ys: Vec<f64> = logs.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let fit = linear_fit(&xs, &ys)?;
    let mean = ys.iter().sum::<f64>() / ys.len() as f64;
    let total: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let resid: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - fit.intercept - fit.slope * x).powi(2))
        .sum();
    let r2 = if total > 0.0 {
        1.0 - resid / total
    } else {
        0.0
    };
    if !(fit.slope < 0.0) || r2 < MIN_FIT_R2 {
        return Err(Error::FitFailure(format!(
            "envelope not decaying (slope {:.3e}, R² {r2:.3})",
            fit.slope
        )));
    }
    Ok(-2.0 / fit.slope)
}

/// Edges of the contiguous `|t|² < 1/2` region around a frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stopband {
    pub lower: f64,
    pub upper: f64,
}

impl Stopband {
    pub fn center(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, omega: f64) -> bool {
        omega > self.lower && omega < self.upper
    }
}

const HALF: f64 = 0.5;

fn find_edge(stack: &LayeredStack, inside: f64, direction: f64) -> Result<f64> {
    let mut step = 1e-6 * inside;
    let mut lo = inside;
    let mut hi = inside + direction * step;
    while stack.transmittance(hi) < HALF {
        lo = hi;
        step *= 1.25;
        hi = lo + direction * step;
        if hi <= 0.0 {
            return Ok(0.0);
        }
        if step > 10.0 * inside {
            return Err(Error::FitFailure("stopband edge not found".into()));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if stack.transmittance(mid) < HALF {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Stopband containing `omega`, or `NotInStopband` when `|t(ω)|² ≥ 1/2`.
pub fn stopband(stack: &LayeredStack, omega: f64) -> Result<Stopband> {
    if stack.transmittance(omega) >= HALF {
        return Err(Error::NotInStopband { omega });
    }
    Ok(Stopband {
        lower: find_edge(stack, omega, -1.0)?,
        upper: find_edge(stack, omega, 1.0)?,
    })
}

/// Comparison of the transmission phase slope with the stored energy at midgap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseEnergyReport {
    /// Least-squares slope of `arg t` against detuning.
    pub slope: f64,
    pub u_per_pin: f64,
    pub relative_difference: f64,
    /// Largest departure of `arg t` from the fitted line (rad).
    pub max_residual: f64,
}

/// Maximum band, as a fraction of stopband width, over which linearity is assessed.
pub const MAX_BAND_FRACTION: f64 = 0.02;

/// Checks that the phase accumulated in the stack is `(U/P_in)·Ω` over a narrow band at midgap.
pub fn phase_energy_check(stack: &LayeredStack, grid: &FrequencyGrid) -> Result<PhaseEnergyReport> {
    let center = grid.omega0() + 0.5 * (grid.first() + grid.last());
    // A transparent stack has no stopband; the band constraints only apply when one exists.
    let midgap = match stopband(stack, center) {
        Ok(band) => {
            let span = grid.last() - grid.first();
            if span > MAX_BAND_FRACTION * band.width() * (1.0 + 1e-9) {
                return Err(invalid(format!(
                    "grid spans {span:e}, more than {MAX_BAND_FRACTION} of the stopband width {:e}",
                    band.width()
                )));
            }
            if (center - band.center()).abs() > 1e-3 * band.width() {
                return Err(invalid("grid is not centered at midgap"));
            }
            band.center()
        }
        Err(Error::NotInStopband { .. }) => center,
        Err(e) => return Err(e),
    };
    let phase = stack_phase(stack, grid)?;
    let x: Vec<f64> = grid.detunings().collect();
    let LinearFit {
        slope,
        max_residual,
        ..
    } = linear_fit(&x, &phase.phi)?;
    let u_per_pin = stored_energy(stack, midgap)?.u_per_pin;
    Ok(PhaseEnergyReport {
        slope,
        u_per_pin,
        relative_difference: (slope - u_per_pin).abs() / u_per_pin,
        max_residual,
    })
}
