//! Experiment-level sweeps: Hartman saturation curves, stored-energy
//! saturation, the mirror-shift (SKC) comparison with vacuum, and the
//! stored-energy comparison with free space.
//!
//! `L/τ_g` is always reported as an apparent speed. It is a length divided by
//! a lifetime.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::photonic::{
    grating_group_delay, group_delay as stack_group_delay, stopband, stored_energy, LayeredStack,
    UniformGrating,
};
use crate::quantum::{dwell_time, group_delay as quantum_group_delay, QuantumBarrier};
use crate::spectral::linear_fit;

/// Barrier whose length is swept at a fixed operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum BarrierFamily {
    /// Rectangular barrier of height `v0` probed at `energy`.
    Quantum { v0: f64, energy: f64 },
    /// Uniform grating probed at `omega`.
    Grating {
        kappa: f64,
        n_bar: f64,
        omega_b: f64,
        omega: f64,
    },
}

impl BarrierFamily {
    /// Group delay and stored quantity (dwell time or `U/P_in`) at `length`.
    fn evaluate(&self, length: f64) -> Result<(f64, f64)> {
        match *self {
            BarrierFamily::Quantum { v0, energy } => {
                let b = QuantumBarrier::new(v0, length)?;
                Ok((quantum_group_delay(&b, energy)?, dwell_time(&b, energy)?))
            }
            BarrierFamily::Grating {
                kappa,
                n_bar,
                omega_b,
                omega,
            } => {
                let g = UniformGrating::new(kappa, length, n_bar, omega_b)?;
                if g.detuning(omega)?.abs() >= kappa {
                    return Err(Error::NotInStopband { omega });
                }
                Ok((grating_group_delay(&g, omega)?, g.stored_energy(omega)?))
            }
        }
    }
}

/// Group delay and stored quantity against barrier length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HartmanSweep {
    pub lengths: Vec<f64>,
    pub tau_g: Vec<f64>,
    /// `U/P_in` for photonic barriers, dwell time for quantum ones.
    pub u_per_pin: Vec<f64>,
    /// `L/τ_g`.
    pub apparent_speed: Vec<f64>,
    /// `|τ_g(L_max) − τ_g(L₁)| / τ_g(L_max)` with `L₁` the shortest length ≥ `L_max/10`.
    pub decade_change: f64,
    /// `τ_g / u_per_pin` per length.
    pub proportionality: Vec<f64>,
}

impl HartmanSweep {
    /// Relative change of `τ_g` between two swept lengths.
    pub fn relative_change(&self, from: f64, to: f64) -> Option<f64> {
        let at = |l: f64| {
            self.lengths
                .iter()
                .position(|&x| (x - l).abs() <= 1e-12 * l.abs().max(1.0))
                .map(|k| self.tau_g[k])
        };
        let (a, b) = (at(from)?, at(to)?);
        Some((b - a).abs() / b.abs())
    }
}

fn check_increasing(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(invalid("sweep needs at least one length"));
    }
    if !values.windows(2).all(|w| w[1] > w[0]) {
        return Err(invalid("lengths must be strictly increasing"));
    }
    Ok(())
}

/// Sweeps `family` over `lengths`, evaluating points in parallel.
pub fn hartman_sweep(family: &BarrierFamily, lengths: &[f64]) -> Result<HartmanSweep> {
    check_increasing(lengths)?;
    let points = lengths
        .par_iter()
        .map(|&l| family.evaluate(l))
        .collect::<Result<Vec<_>>>()?;
    let (tau_g, u_per_pin): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
    let last = *lengths.last().expect("checked nonempty");
    let first_in_decade = lengths
        .iter()
        .position(|&l| l >= 0.1 * last)
        .expect("last length qualifies");
    let tau_last = tau_g[tau_g.len() - 1];
    Ok(HartmanSweep {
        apparent_speed: lengths.iter().zip(&tau_g).map(|(l, t)| l / t).collect(),
        decade_change: (tau_last - tau_g[first_in_decade]).abs() / tau_last.abs(),
        proportionality: tau_g.iter().zip(&u_per_pin).map(|(t, u)| t / u).collect(),
        lengths: lengths.to_vec(),
        tau_g,
        u_per_pin,
    })
}

/// Periodic stack that can be built with any number of periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StackFamily {
    /// `(HL)^N H` quarter-wave stack in vacuum, probed at `omega0`.
    QuarterWave {
        n_high: f64,
        n_low: f64,
        omega0: f64,
    },
    /// Quarter-wave stack equivalent to a uniform grating, one period per `Λ`,
    /// probed at the Bragg frequency.
    Grating {
        kappa: f64,
        n_bar: f64,
        omega_b: f64,
    },
}

impl StackFamily {
    pub fn build(&self, periods: usize) -> Result<LayeredStack> {
        match *self {
            StackFamily::QuarterWave {
                n_high,
                n_low,
                omega0,
            } => LayeredStack::quarter_wave(n_high, n_low, 2 * periods + 1, omega0),
            StackFamily::Grating {
                kappa,
                n_bar,
                omega_b,
            } => {
                let period = std::f64::consts::PI / (n_bar * omega_b);
                UniformGrating::new(kappa, periods as f64 * period, n_bar, omega_b)?
                    .equivalent_stack()
            }
        }
    }

    pub fn omega(&self) -> f64 {
        match *self {
            StackFamily::QuarterWave { omega0, .. } => omega0,
            StackFamily::Grating { omega_b, .. } => omega_b,
        }
    }
}

/// Stored energy and group delay against stack length, with fitted decay depths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaturationCurve {
    pub periods: Vec<usize>,
    pub lengths: Vec<f64>,
    pub u_per_pin: Vec<f64>,
    pub tau_g: Vec<f64>,
    /// `ℓ` from `U(∞) − U(L) ∝ exp(−2L/ℓ)`; absent when `U` does not saturate.
    pub energy_decay_depth: Option<f64>,
    /// The same fit applied to `τ_g`.
    pub delay_decay_depth: Option<f64>,
    /// Field penetration depth of the longest stack.
    pub field_depth: Option<f64>,
}

/// Significant increments must exceed this fraction of the value to enter the fit.
const INCREMENT_FLOOR: f64 = 1e-9;

/// Decay depth from the increments of a saturating curve.
///
/// Increments of `U(∞) − c·exp(−2L/ℓ)` between successive lengths are
/// themselves proportional to `exp(−2L/ℓ)` when the length step is constant.
fn decay_depth(lengths: &[f64], values: &[f64]) -> Result<Option<f64>> {
    let steps: Vec<f64> = lengths.windows(2).map(|w| w[1] - w[0]).collect();
    if steps.is_empty() || steps.iter().any(|s| (s / steps[0] - 1.0).abs() > 1e-9) {
        return Err(Error::FitFailure(
            "decay fit needs equally spaced lengths".into(),
        ));
    }
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let (xs, ys): (Vec<f64>, Vec<f64>) = lengths
        .windows(2)
        .zip(values.windows(2))
        .map(|(l, v)| (l[0], v[1] - v[0]))
        .filter(|&(_, d)| d > INCREMENT_FLOOR * scale)
        .map(|(x, d)| (x, d.ln()))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::FitFailure(
            "fewer than three resolvable increments".into(),
        ));
    }
    let fit = linear_fit(&xs, &ys)?;
    // A non-saturating curve has constant increments; treat a slope this small as no decay.
    if fit.slope > -1e-6 / (lengths[lengths.len() - 1] - lengths[0]) {
        return Ok(None);
    }
    if fit.max_residual > 0.1 {
        return Err(Error::FitFailure(format!(
            "increments are not exponential (residual {:.3})",
            fit.max_residual
        )));
    }
    Ok(Some(-2.0 / fit.slope))
}

/// Builds the family at each period count and fits the saturation of `U/P_in` and `τ_g`.
pub fn energy_saturation(family: &StackFamily, periods: &[usize]) -> Result<SaturationCurve> {
    if periods.len() < 4 || !periods.windows(2).all(|w| w[1] > w[0]) {
        return Err(invalid(
            "need at least four strictly increasing period counts",
        ));
    }
    let omega = family.omega();
    let points = periods
        .par_iter()
        .map(|&p| {
            let stack = family.build(p)?;
            let report = stored_energy(&stack, omega)?;
            let tau = stack_group_delay(&stack, omega)?;
            Ok((stack.total_length(), report, tau))
        })
        .collect::<Result<Vec<_>>>()?;
    let lengths: Vec<f64> = points.iter().map(|p| p.0).collect();
    let u_per_pin: Vec<f64> = points.iter().map(|p| p.1.u_per_pin).collect();
    let tau_g: Vec<f64> = points.iter().map(|p| p.2).collect();
    Ok(SaturationCurve {
        energy_decay_depth: decay_depth(&lengths, &u_per_pin)?,
        delay_decay_depth: decay_depth(&lengths, &tau_g)?,
        field_depth: points.last().and_then(|p| p.1.penetration_depth),
        periods: periods.to_vec(),
        lengths,
        u_per_pin,
        tau_g,
    })
}

/// Delay of a stack compared with the same length of vacuum, as read from a
/// mirror shift in a two-path interferometer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkcReport {
    pub barrier_delay: f64,
    pub vacuum_delay: f64,
    /// `vacuum_delay − barrier_delay`.
    pub advance: f64,
    /// Mirror displacement equivalent to `advance` (`c = 1`).
    pub mirror_shift: f64,
    /// `L / barrier_delay`.
    pub apparent_speed: f64,
    pub u_barrier: f64,
    pub u_free: f64,
    /// `|r|²`, the fraction of the incident energy that leaves backwards.
    pub backward_escape: f64,
}

impl SkcReport {
    /// Measures the comparison at `omega` whether or not it lies in a stopband.
    pub fn measure(stack: &LayeredStack, omega: f64) -> Result<Self> {
        let barrier_delay = stack_group_delay(stack, omega)?;
        let vacuum_delay = stack.total_length();
        let advance = vacuum_delay - barrier_delay;
        let energy = stored_energy(stack, omega)?;
        let (_, r) = stack.amplitudes(omega);
        Ok(Self {
            barrier_delay,
            vacuum_delay,
            advance,
            mirror_shift: advance,
            apparent_speed: vacuum_delay / barrier_delay,
            u_barrier: energy.u_per_pin,
            u_free: energy.free_space_u_per_pin,
            backward_escape: r.norm_sqr(),
        })
    }

    /// `u_free − u_barrier`, the stored-energy deficit that the advance should equal.
    pub fn energy_deficit(&self) -> f64 {
        self.u_free - self.u_barrier
    }

    pub fn interpretation(&self) -> String {
        let escape = if self.backward_escape > 0.5 {
            "most of it in the backward (reflection) direction"
        } else {
            "mostly in the forward direction at this frequency"
        };
        format!(
            "The barrier delay {:.6} is the lifetime of the energy stored in the stack \
             (U/P_in = {:.6}), not a traversal time. The stored energy leaves {escape}: \
             |r|^2 = {:.6}. The advance {:.6} over vacuum matches the stored-energy deficit \
             {:.6} relative to free space. The apparent speed {:.4} is a length divided by \
             a lifetime and is not a velocity.",
            self.barrier_delay,
            self.u_barrier,
            self.backward_escape,
            self.advance,
            self.energy_deficit(),
            self.apparent_speed
        )
    }
}

/// [`SkcReport::measure`] restricted to a frequency inside a stopband.
pub fn skc_report(stack: &LayeredStack, omega_mid: f64) -> Result<SkcReport> {
    stopband(stack, omega_mid)?;
    SkcReport::measure(stack, omega_mid)
}

/// Stored energy in the stack against the same length of free space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeSpaceComparison {
    pub u_barrier: f64,
    pub u_free: f64,
    /// `u_barrier < u_free`.
    pub reduced: bool,
    /// Whether `omega` lies in a stopband; the reduction is only expected there.
    pub in_stopband: bool,
    pub backward_escape: f64,
}

pub fn free_space_comparison(stack: &LayeredStack, omega: f64) -> Result<FreeSpaceComparison> {
    let in_stopband = match stopband(stack, omega) {
        Ok(_) => true,
        Err(Error::NotInStopband { .. }) => false,
        Err(e) => return Err(e),
    };
    let energy = stored_energy(stack, omega)?;
    let (_, r) = stack.amplitudes(omega);
    Ok(FreeSpaceComparison {
        u_barrier: energy.u_per_pin,
        u_free: energy.free_space_u_per_pin,
        reduced: energy.u_per_pin < energy.free_space_u_per_pin,
        in_stopband,
        backward_escape: r.norm_sqr(),
    })
}
