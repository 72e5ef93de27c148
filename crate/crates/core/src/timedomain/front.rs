use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::photonic::{group_delay, stopband, LayeredStack};

/// Synthesis band required, in stopband widths.
pub const MIN_BAND_FACTOR: f64 = 50.0;
/// Quiet time before the turn-on and after the turn-off, in signal durations.
const QUIET_DURATIONS: f64 = 4.0;

/// Turn-on profile of the front test: a `sin²` ramp over `n_cycles` carrier
/// periods, a flat plateau, and a mirror-image turn-off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontRamp {
    pub n_cycles: f64,
    pub plateau_cycles: f64,
    /// Synthesis band (the full FFT bandwidth) in units of the stopband width.
    pub band_factor: f64,
}

impl FrontRamp {
    fn envelope(&self, t: f64, period: f64) -> f64 {
        let rise = self.n_cycles * period;
        let fall_start = rise + self.plateau_cycles * period;
        if t <= 0.0 || t >= fall_start + rise {
            0.0
        } else if t < rise {
            (0.5 * PI * t / rise).sin().powi(2)
        } else if t <= fall_start {
            1.0
        } else {
            (0.5 * PI * (fall_start + rise - t) / rise).sin().powi(2)
        }
    }
}

/// Outcome of the front test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrontTestResult {
    /// Vacuum transit time `L` of a light front after the turn-on.
    pub front_time: f64,
    /// Transmitted energy arriving before `front_time`, over total transmitted energy.
    pub pre_front_fraction: f64,
    /// Full synthesis bandwidth used.
    pub band: f64,
    /// Group delay at the carrier, for comparison with `front_time`.
    pub tau_g: f64,
}

/// Switches on a carrier at `omega` with a smooth compact-support ramp and
/// measures how much transmitted energy precedes the vacuum light front.
///
/// When `omega` lies in a stopband it must be the band center, and the band
/// width sets the required synthesis band. A stack with no stopband at `omega`
/// is a control run and uses `reference_width` in its place.
pub fn front_causality(
    stack: &LayeredStack,
    omega: f64,
    ramp: &FrontRamp,
    reference_width: f64,
) -> Result<FrontTestResult> {
    if !(ramp.n_cycles > 0.0 && ramp.plateau_cycles >= 0.0) {
        return Err(invalid("ramp needs a positive number of cycles"));
    }
    if !(omega > 0.0) {
        return Err(invalid("carrier must be positive"));
    }
    let width = match stopband(stack, omega) {
        Ok(band) => {
            if (omega - band.center()).abs() > 1e-3 * band.width() {
                return Err(invalid("carrier is not at midgap"));
            }
            band.width()
        }
        Err(Error::NotInStopband { .. }) => {
            if !(reference_width > 0.0) {
                return Err(invalid("control run needs a positive reference width"));
            }
            reference_width
        }
        Err(e) => return Err(e),
    };
    let band = ramp.band_factor * width;
    let required = MIN_BAND_FACTOR * width;
    if band < required * (1.0 - 1e-12) {
        return Err(Error::BandTooNarrow { band, required });
    }

    let period = TAU / omega;
    let duration = (2.0 * ramp.n_cycles + ramp.plateau_cycles) * period;
    let optical: f64 = stack.layers().iter().map(|l| l.n * l.d).sum();
    let dt = TAU / band;
    let record = (2.0 * QUIET_DURATIONS + 1.0) * duration + 2.0 * optical;
    let n = ((record / dt).ceil() as usize).next_power_of_two();
    let t_on = QUIET_DURATIONS * duration;
    let times: Vec<f64> = (0..n).map(|j| j as f64 * dt).collect();
    let input: Vec<Complex64> = times
        .iter()
        .map(|&t| Complex64::new(ramp.envelope(t - t_on, period), 0.0))
        .collect();

    let mut planner = FftPlanner::new();
    let mut buf = input;
    planner.plan_fft_inverse(n).process(&mut buf);
    let step = TAU / (n as f64 * dt);
    for (k, v) in buf.iter_mut().enumerate() {
        let signed = if k < n.div_ceil(2) {
            k as f64
        } else {
            k as f64 - n as f64
        };
        let (t, _) = stack.amplitudes(omega + signed * step);
        *v *= t;
    }
    planner.plan_fft_forward(n).process(&mut buf);

    let front_time = stack.total_length();
    let cutoff = t_on + front_time;
    let total: f64 = buf.iter().map(|v| v.norm_sqr()).sum();
    let early: f64 = buf
        .iter()
        .zip(&times)
        .filter(|(_, &t)| t < cutoff)
        .map(|(v, _)| v.norm_sqr())
        .sum();

    Ok(FrontTestResult {
        front_time,
        pre_front_fraction: early / total,
        band,
        tau_g: group_delay(stack, omega)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const RAMP: FrontRamp = FrontRamp {
        n_cycles: 4.0,
        plateau_cycles: 20.0,
        band_factor: 50.0,
    };

    fn opaque() -> (LayeredStack, f64, f64) {
        let w0 = TAU;
        let s = LayeredStack::quarter_wave(2.22, 1.41, 21, w0).unwrap();
        let band = stopband(&s, w0).unwrap();
        (s, band.center(), band.width())
    }

    #[test]
    fn vacuum_control_sets_the_floor() {
        let (_, mid, width) = opaque();
        let vac = LayeredStack::vacuum(1.3).unwrap();
        let res = front_causality(&vac, mid, &RAMP, width).unwrap();
        assert!(res.pre_front_fraction < 1e-8, "{res:?}");
        assert!((res.tau_g - 1.3).abs() < 1e-9);
    }

    #[test]
    fn opaque_stack_respects_the_front() {
        let (s, mid, width) = opaque();
        let res = front_causality(&s, mid, &RAMP, width).unwrap();
        assert!(res.pre_front_fraction < 1e-4, "{res:?}");
        assert!(res.tau_g < res.front_time);
        let wider = FrontRamp {
            band_factor: 100.0,
            ..RAMP
        };
        let res2 = front_causality(&s, mid, &wider, width).unwrap();
        assert!(
            res2.pre_front_fraction <= res.pre_front_fraction * (1.0 + 1e-6),
            "{res2:?}"
        );
    }

    #[test]
    fn narrow_band_and_off_center_are_rejected() {
        let (s, mid, width) = opaque();
        let narrow = FrontRamp {
            band_factor: 10.0,
            ..RAMP
        };
        assert!(matches!(
            front_causality(&s, mid, &narrow, width),
            Err(Error::BandTooNarrow { .. })
        ));
        assert!(front_causality(&s, mid + 0.1 * width, &RAMP, width).is_err());
    }
}
