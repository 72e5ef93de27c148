use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{
    locate_peak, phase_derivative, unwrap_phase, ComplexResponse, FrequencyGrid, MIN_SAMPLES,
};

/// Envelope level the record ends must stay below.
const END_DECAY: f64 = 1e-12;
/// Spectral power level (relative to peak) that must lie inside the response grid.
const SPECTRUM_LEVEL: f64 = 1e-6;
/// Output level at the record ends above which the record is too short.
const WRAP_LEVEL: f64 = 1e-9;
/// Record length in units of the intensity FWHM duration.
const RECORD_DURATIONS: f64 = 16.0;

/// Complex envelope `A(0, t)` of a pulse on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseEnvelope {
    times: Vec<f64>,
    a: Vec<Complex64>,
    omega0: f64,
}

impl PulseEnvelope {
    pub fn new(times: Vec<f64>, a: Vec<Complex64>, omega0: f64) -> Result<Self> {
        if times.len() != a.len() || times.len() < MIN_SAMPLES {
            return Err(invalid("envelope needs matching time and amplitude arrays"));
        }
        if !omega0.is_finite() {
            return Err(invalid("carrier frequency must be finite"));
        }
        let dt = times[1] - times[0];
        if !(dt > 0.0) {
            return Err(invalid("time samples must increase"));
        }
        let uniform = times
            .windows(2)
            .all(|w| ((w[1] - w[0]) / dt - 1.0).abs() < 1e-9);
        if !uniform {
            return Err(invalid("time samples are not uniformly spaced"));
        }
        let peak = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return Err(Error::FlatSignal);
        }
        let ends = a[0].norm().max(a[a.len() - 1].norm()) / peak;
        if ends > END_DECAY {
            return Err(Error::WraparoundDetected { level: ends });
        }
        Ok(Self { times, a, omega0 })
    }

    /// Transform-limited Gaussian centered at `t = 0`.
    ///
    /// `bandwidth` is the FWHM of the power spectrum. The record spans sixteen
    /// intensity FWHM durations with `samples` points.
    pub fn gaussian(omega0: f64, bandwidth: f64, samples: usize) -> Result<Self> {
        if !(bandwidth > 0.0 && bandwidth.is_finite()) {
            return Err(invalid("bandwidth must be positive"));
        }
        // |A|² = exp(−t²/T²) has power spectrum exp(−Ω²T²).
        let t_scale = 2.0 * 2f64.ln().sqrt() / bandwidth;
        let duration = 2.0 * 2f64.ln().sqrt() * t_scale;
        let record = RECORD_DURATIONS * duration;
        let dt = record / samples as f64;
        let t0 = -0.5 * record;
        let times: Vec<f64> = (0..samples).map(|j| t0 + j as f64 * dt).collect();
        let a = times
            .iter()
            .map(|t| Complex64::new((-0.5 * (t / t_scale).powi(2)).exp(), 0.0))
            .collect();
        Self::new(times, a, omega0)
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.a
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn dt(&self) -> f64 {
        self.times[1] - self.times[0]
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Detuning grid aligned with the FFT bins of this record, in ascending order.
    pub fn spectral_grid(&self) -> FrequencyGrid {
        let n = self.len();
        let step = std::f64::consts::TAU / (n as f64 * self.dt());
        FrequencyGrid::new(self.omega0, -((n / 2) as f64) * step, step, n)
            .expect("record has at least MIN_SAMPLES points")
    }

    /// Energy `∫|A|² dt`.
    pub fn energy(&self) -> f64 {
        self.a.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dt()
    }
}

/// Signed frequency index of FFT bin `k`.
fn signed_bin(k: usize, n: usize) -> isize {
    if k < n.div_ceil(2) {
        k as isize
    } else {
        k as isize - n as isize
    }
}

/// Spectrum `Σ A_j e^{+iΩ_k t_j}` up to a record-origin phase that cancels on the way back.
fn to_spectrum(planner: &mut FftPlanner<f64>, a: &[Complex64]) -> Vec<Complex64> {
    let mut buf = a.to_vec();
    planner.plan_fft_inverse(buf.len()).process(&mut buf);
    buf
}

fn to_time(planner: &mut FftPlanner<f64>, spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    planner.plan_fft_forward(buf.len()).process(&mut buf);
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|v| *v *= scale);
    buf
}

fn intensity(a: &[Complex64]) -> Vec<f64> {
    a.iter().map(|v| v.norm_sqr()).collect()
}

fn rms_width(times: &[f64], a: &[Complex64]) -> f64 {
    let w = intensity(a);
    let total: f64 = w.iter().sum();
    let mean = times.iter().zip(&w).map(|(t, p)| t * p).sum::<f64>() / total;
    let var = times
        .iter()
        .zip(&w)
        .map(|(t, p)| (t - mean).powi(2) * p)
        .sum::<f64>()
        / total;
    var.sqrt()
}

/// Transmitted pulse and its comparison with the quasi-static law `A(L,t) = T₀·A(0, t − τ_g)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationResult {
    /// Transmitted envelope on the input time samples.
    pub a_out: Vec<Complex64>,
    /// Shift of the intensity peak.
    pub peak_delay: f64,
    /// RMS duration out over RMS duration in.
    pub width_ratio: f64,
    /// `max|A_out − T₀·A_in(t − τ_g)| / max|A_out|`.
    pub quasistatic_deviation: f64,
    pub tau_g: f64,
    pub carrier_transmission: Complex64,
    pub input_energy: f64,
    pub transmitted_energy: f64,
    pub reflected_energy: f64,
}

impl PropagationResult {
    /// `|(E_t + E_r)/E_in − 1|`.
    pub fn energy_defect(&self) -> f64 {
        ((self.transmitted_energy + self.reflected_energy) / self.input_energy - 1.0).abs()
    }
}

/// Propagates `pulse` through the barrier whose response is `resp`.
///
/// `resp` must be sampled on (a superset of contiguous samples of) the pulse's
/// [`PulseEnvelope::spectral_grid`]. FFT bins it does not cover are dropped,
/// which is allowed only when they carry less than 1e-6 of the peak spectral power.
pub fn propagate_spectral(
    resp: &ComplexResponse,
    pulse: &PulseEnvelope,
) -> Result<PropagationResult> {
    let grid = &resp.grid;
    if (grid.omega0() - pulse.omega0()).abs() > 1e-12 * pulse.omega0().abs().max(1.0) {
        return Err(invalid("response and pulse carriers differ"));
    }
    let n = pulse.len();
    let dt = pulse.dt();
    let step = std::f64::consts::TAU / (n as f64 * dt);
    let mut planner = FftPlanner::new();
    let spectrum = to_spectrum(&mut planner, &pulse.a);
    let peak_power = spectrum.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);

    let mut t_spec = vec![Complex64::new(0.0, 0.0); n];
    let mut r_spec = vec![Complex64::new(0.0, 0.0); n];
    let mut outside = 0.0f64;
    for k in 0..n {
        let detuning = signed_bin(k, n) as f64 * step;
        match grid.index_of(detuning) {
            Some(g) if ((grid.detuning(g) - detuning) / step).abs() < 1e-6 => {
                t_spec[k] = resp.t[g] * spectrum[k];
                r_spec[k] = resp.r[g] * spectrum[k];
            }
            _ => outside = outside.max(spectrum[k].norm_sqr() / peak_power),
        }
    }
    if outside > SPECTRUM_LEVEL {
        return Err(Error::SpectrumExceedsGrid { level: outside });
    }

    let a_out = to_time(&mut planner, &t_spec);
    let out_peak = a_out.iter().map(|v| v.norm()).fold(0.0, f64::max);
    if out_peak == 0.0 {
        return Err(Error::FlatSignal);
    }
    let ends = a_out[0].norm().max(a_out[n - 1].norm()) / out_peak;
    if ends > WRAP_LEVEL {
        return Err(Error::WraparoundDetected { level: ends });
    }

    let center = grid
        .index_of(0.0)
        .ok_or_else(|| invalid("response grid has no sample at the carrier"))?;
    if center < 4 || center + 4 >= grid.len() {
        return Err(Error::EdgeOfGrid { needed: 4 });
    }
    let window = FrequencyGrid::new(grid.omega0(), grid.detuning(center - 4), grid.step(), 9)?;
    let local = ComplexResponse::new(
        window,
        resp.t[center - 4..=center + 4].to_vec(),
        resp.r[center - 4..=center + 4].to_vec(),
    )?;
    let tau_g = phase_derivative(&unwrap_phase(&local)?, 0.0)?.value;
    let t0 = resp.t[center];

    let shifted: Vec<Complex64> = (0..n)
        .map(|k| {
            let detuning = signed_bin(k, n) as f64 * step;
            t0 * Complex64::from_polar(1.0, detuning * tau_g) * spectrum[k]
        })
        .collect();
    let reference = to_time(&mut planner, &shifted);
    let deviation = a_out
        .iter()
        .zip(&reference)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / out_peak;

    let start = pulse.times[0];
    let peak_in = locate_peak(&intensity(&pulse.a), start, dt)?;
    let peak_out = locate_peak(&intensity(&a_out), start, dt)?;
    let spectral_energy =
        |s: &[Complex64]| s.iter().map(|v| v.norm_sqr()).sum::<f64>() * dt / n as f64;

    Ok(PropagationResult {
        peak_delay: peak_out - peak_in,
        width_ratio: rms_width(&pulse.times, &a_out) / rms_width(&pulse.times, &pulse.a),
        quasistatic_deviation: deviation,
        tau_g,
        carrier_transmission: t0,
        input_energy: pulse.energy(),
        transmitted_energy: spectral_energy(&t_spec),
        reflected_energy: spectral_energy(&r_spec),
        a_out,
    })
}
