use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Minimum sample count; the five-point stencil needs it.
pub const MIN_SAMPLES: usize = 5;

/// Uniformly spaced detunings `Ω_k = start + k·step` around a carrier `omega0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    omega0: f64,
    start: f64,
    step: f64,
    count: usize,
}

impl FrequencyGrid {
    pub fn new(omega0: f64, start: f64, step: f64, count: usize) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(invalid(format!(
                "grid spacing must be positive, got {step}"
            )));
        }
        if count < MIN_SAMPLES {
            return Err(invalid(format!(
                "grid needs at least {MIN_SAMPLES} samples, got {count}"
            )));
        }
        if !omega0.is_finite() || !start.is_finite() {
            return Err(invalid("grid origin must be finite"));
        }
        Ok(Self {
            omega0,
            start,
            step,
            count,
        })
    }

    /// Odd-sized grid spanning `[-half_width, half_width]` with a sample at zero detuning.
    pub fn centered(omega0: f64, half_width: f64, count: usize) -> Result<Self> {
        if count.is_multiple_of(2) {
            return Err(invalid("centered grid needs an odd sample count"));
        }
        let step = 2.0 * half_width / (count - 1) as f64;
        Self::new(omega0, -half_width, step, count)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn detuning(&self, k: usize) -> f64 {
        self.start + k as f64 * self.step
    }

    pub fn omega(&self, k: usize) -> f64 {
        self.omega0 + self.detuning(k)
    }

    pub fn detunings(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.detuning(k))
    }

    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|k| self.omega(k))
    }

    pub fn first(&self) -> f64 {
        self.start
    }

    pub fn last(&self) -> f64 {
        self.detuning(self.count - 1)
    }

    /// Index of the sample sitting at `detuning`, if one does (to 1e-6 of a step).
    pub fn index_of(&self, detuning: f64) -> Option<usize> {
        let pos = (detuning - self.start) / self.step;
        let k = pos.round();
        if (pos - k).abs() > 1e-6 || k < 0.0 || k >= self.count as f64 {
            return None;
        }
        Some(k as usize)
    }
}

/// Complex transmission and reflection sampled on a [`FrequencyGrid`].
///
/// Amplitudes are flux-normalized: for a lossless system `|t|² + |r|² = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexResponse {
    pub grid: FrequencyGrid,
    pub t: Vec<Complex64>,
    pub r: Vec<Complex64>,
}

impl ComplexResponse {
    pub fn new(grid: FrequencyGrid, t: Vec<Complex64>, r: Vec<Complex64>) -> Result<Self> {
        if t.len() != grid.len() || r.len() != grid.len() {
            return Err(invalid(format!(
                "response arrays ({}, {}) do not match grid size {}",
                t.len(),
                r.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, t, r })
    }

    /// Samples `f(omega) -> (t, r)` at every grid frequency.
    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> (Complex64, Complex64)) -> Self {
        let (t, r) = grid.omegas().map(f).unzip();
        Self { grid, t, r }
    }

    /// Fallible variant of [`ComplexResponse::from_fn`].
    pub fn try_from_fn(
        grid: FrequencyGrid,
        f: impl Fn(f64) -> Result<(Complex64, Complex64)>,
    ) -> Result<Self> {
        let pairs = grid.omegas().map(f).collect::<Result<Vec<_>>>()?;
        let (t, r) = pairs.into_iter().unzip();
        Ok(Self { grid, t, r })
    }

    /// Largest deviation of `|t|² + |r|²` from one.
    pub fn unitarity_defect(&self) -> f64 {
        self.t
            .iter()
            .zip(&self.r)
            .map(|(t, r)| (t.norm_sqr() + r.norm_sqr() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Steady-state transmission at zero detuning.
    pub fn carrier_transmission(&self) -> Option<Complex64> {
        self.grid.index_of(0.0).map(|k| self.t[k])
    }
}
