use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::grid::{ComplexResponse, FrequencyGrid};
use crate::error::{invalid, Error, Result};

/// Amplitudes below this are treated as zero; their phase is meaningless.
const ZERO_AMPLITUDE: f64 = 1e-300;
/// Relative disagreement between the `h` and `2h` derivative estimates that counts as failure.
const CONVERGENCE_TOL: f64 = 1e-6;
/// Samples needed on each side of the evaluation point (the `2h` stencil reaches `±4h`).
const STENCIL_REACH: usize = 4;

/// Continuous (branch-tracked) phase of a transmission amplitude.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnwrappedPhase {
    pub grid: FrequencyGrid,
    pub phi: Vec<f64>,
}

/// A derivative together with its Richardson error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

/// Unwraps `arg t` along the grid.
///
/// Each step is corrected by the nearest multiple of 2π; a step that still
/// spans π or more means the grid cannot resolve the phase.
pub fn unwrap_phase(resp: &ComplexResponse) -> Result<UnwrappedPhase> {
    let mut phi = Vec::with_capacity(resp.t.len());
    let mut prev_raw = 0.0;
    for (k, t) in resp.t.iter().enumerate() {
        if t.norm() < ZERO_AMPLITUDE {
            return Err(Error::ZeroAmplitude { index: k });
        }
        let raw = t.arg();
        if k == 0 {
            phi.push(raw);
        } else {
            let jump = raw - prev_raw;
            let step = jump - TAU * (jump / TAU).round();
            if step.abs() >= PI {
                return Err(Error::UndersampledPhase {
                    index: k - 1,
                    jump: step,
                });
            }
            let last = phi[k - 1];
            phi.push(last + step);
        }
        prev_raw = raw;
    }
    Ok(UnwrappedPhase {
        grid: resp.grid,
        phi,
    })
}

impl UnwrappedPhase {
    /// Phase values from a closure; used for analytic phases in tests and fits.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> f64) -> Self {
        let phi = grid.detunings().map(f).collect();
        Self { grid, phi }
    }

    pub fn at(&self, detuning: f64) -> Option<f64> {
        self.grid.index_of(detuning).map(|k| self.phi[k])
    }
}

fn five_point(phi: &[f64], k: usize, stride: usize, h: f64) -> f64 {
    let f = |offset: isize| phi[(k as isize + offset * stride as isize) as usize];
    (f(-2) - 8.0 * f(-1) + 8.0 * f(1) - f(2)) / (12.0 * h)
}

/// `dφ/dω` at the grid sample `at` (a detuning).
///
/// Five-point central differences at spacings `h` and `2h` are combined by
/// Richardson extrapolation; their difference gives the error estimate.
pub fn phase_derivative(phase: &UnwrappedPhase, at: f64) -> Result<Derivative> {
    let grid = &phase.grid;
    let k = grid
        .index_of(at)
        .ok_or_else(|| invalid(format!("detuning {at} is not a grid sample")))?;
    if k < STENCIL_REACH || k + STENCIL_REACH >= grid.len() {
        return Err(Error::EdgeOfGrid {
            needed: STENCIL_REACH,
        });
    }
    let h = grid.step();
    let fine = five_point(&phase.phi, k, 1, h);
    let coarse = five_point(&phase.phi, k, 2, 2.0 * h);
    let value = (16.0 * fine - coarse) / 15.0;

    // Cancellation in the stencil limits agreement to roughly eps·|φ|/h.
    let scale = (k - STENCIL_REACH..=k + STENCIL_REACH)
        .map(|j| phase.phi[j].abs())
        .fold(0.0, f64::max);
    let rounding = 64.0 * f64::EPSILON * scale / h;
    if (fine - coarse).abs() > CONVERGENCE_TOL * fine.abs().max(coarse.abs()) + rounding {
        return Err(Error::NonConvergent { fine, coarse });
    }
    Ok(Derivative {
        value,
        error: (fine - coarse).abs() / 15.0,
    })
}

/// Least-squares line through `(x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest absolute residual from the fitted line.
    pub max_residual: f64,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LinearFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(invalid("linear fit needs two or more paired samples"));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|xi| (xi - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(invalid("linear fit abscissae are all equal"));
    }
    let sxy: f64 = x.iter().zip(y).map(|(xi, yi)| (xi - mx) * (yi - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let max_residual = x
        .iter()
        .zip(y)
        .map(|(xi, yi)| (yi - (intercept + slope * xi)).abs())
        .fold(0.0, f64::max);
    Ok(LinearFit {
        slope,
        intercept,
        max_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn grid(n: usize, step: f64) -> FrequencyGrid {
        FrequencyGrid::new(10.0, -(n as f64 - 1.0) / 2.0 * step, step, n).unwrap()
    }

    #[test]
    fn constant_response_has_zero_phase() {
        let g = grid(11, 0.1);
        let resp =
            ComplexResponse::from_fn(g, |_| (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        let p = unwrap_phase(&resp).unwrap();
        assert!(p.phi.iter().all(|&v| v == 0.0));
        let d = phase_derivative(&p, 0.0).unwrap();
        assert_eq!(d.value, 0.0);
    }

    #[test]
    fn linear_phase_unwraps_to_itself() {
        // 3·Ω over [-4, 4] winds through several branch cuts.
        let g = grid(401, 0.02);
        let resp = ComplexResponse::new(
            g,
            g.detunings()
                .map(|w| Complex64::from_polar(1.0, 3.0 * w))
                .collect(),
            vec![Complex64::new(0.0, 0.0); g.len()],
        )
        .unwrap();
        let p = unwrap_phase(&resp).unwrap();
        // Anchor is the principal value of the first sample.
        let offset = p.phi[0] - 3.0 * g.first();
        assert!((offset / TAU - (offset / TAU).round()).abs() < 1e-12);
        for (k, w) in g.detunings().enumerate() {
            assert!((p.phi[k] - offset - 3.0 * w).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_amplitude_is_rejected() {
        let g = grid(5, 0.1);
        let mut t = vec![Complex64::new(1.0, 0.0); 5];
        t[3] = Complex64::new(0.0, 0.0);
        let resp = ComplexResponse::new(g, t, vec![Complex64::new(0.0, 0.0); 5]).unwrap();
        assert_eq!(unwrap_phase(&resp), Err(Error::ZeroAmplitude { index: 3 }));
    }

    #[test]
    fn half_turn_step_is_undersampled() {
        let g = grid(5, 1.0);
        let t = (0..5)
            .map(|k| Complex64::from_polar(1.0, PI * k as f64))
            .collect();
        let resp = ComplexResponse::new(g, t, vec![Complex64::new(0.0, 0.0); 5]).unwrap();
        assert!(matches!(
            unwrap_phase(&resp),
            Err(Error::UndersampledPhase { index: 0, .. })
        ));
    }

    #[test]
    fn pure_delay_derivative() {
        let g = grid(21, 0.01);
        let p = UnwrappedPhase::from_fn(g, |w| 5.0 * w);
        let d = phase_derivative(&p, 0.0).unwrap();
        assert!((d.value - 5.0).abs() < 1e-12);
        let d = phase_derivative(&p, g.detuning(4)).unwrap();
        assert!((d.value - 5.0).abs() < 1e-12);
    }

    #[test]
    fn derivative_edges_and_off_grid() {
        let g = grid(21, 0.01);
        let p = UnwrappedPhase::from_fn(g, |w| w);
        assert_eq!(
            phase_derivative(&p, g.detuning(3)),
            Err(Error::EdgeOfGrid { needed: 4 })
        );
        assert_eq!(
            phase_derivative(&p, g.detuning(17)),
            Err(Error::EdgeOfGrid { needed: 4 })
        );
        assert!(matches!(
            phase_derivative(&p, 0.003),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn smooth_phase_derivative_is_accurate() {
        let g = grid(9, 1e-3);
        let p = UnwrappedPhase::from_fn(g, |w| (2.0 * w).sin() + w.powi(3));
        let d = phase_derivative(&p, 0.0).unwrap();
        assert!((d.value - 2.0).abs() < 1e-11, "{}", d.value);
        assert!(d.error < 1e-6);
    }

    #[test]
    fn oscillating_phase_does_not_converge() {
        let g = grid(9, 0.5);
        let p = UnwrappedPhase::from_fn(g, |w| (6.0 * w).sin());
        assert!(matches!(
            phase_derivative(&p, 0.0),
            Err(Error::NonConvergent { .. })
        ));
    }

    #[test]
    fn fit_recovers_line() {
        let x: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 2.5 * v - 1.0).collect();
        let fit = linear_fit(&x, &y).unwrap();
        assert!((fit.slope - 2.5).abs() < 1e-12);
        assert!((fit.intercept + 1.0).abs() < 1e-12);
        assert!(fit.max_residual < 1e-12);
    }
}
