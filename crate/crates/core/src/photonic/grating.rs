use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::stack::{Layer, LayeredStack};
use crate::error::{invalid, Error, Result};
use crate::spectral::{integrate, ComplexResponse, FrequencyGrid};

/// Coupled-mode validity limit on `|δ|` relative to `ω_B`.
const MAX_DETUNING: f64 = 0.2;

/// Uniform Bragg grating in coupled-mode form.
///
/// Forward and backward envelopes obey `A' = iδA + iκB`, `B' = −iκA − iδB`
/// with `δ = n̄(ω − ω_B)`, embedded in a medium of index `n̄`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UniformGrating {
    kappa: f64,
    length: f64,
    n_bar: f64,
    omega_b: f64,
}

/// `sinh(x)/x`, finite at zero.
fn sinhc(x: Complex64) -> Complex64 {
    if x.norm() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

impl UniformGrating {
    pub fn new(kappa: f64, length: f64, n_bar: f64, omega_b: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid(format!(
                "coupling must be nonnegative, got {kappa}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(invalid(format!(
                "grating length must be positive, got {length}"
            )));
        }
        if !(n_bar > 0.0 && n_bar.is_finite() && omega_b > 0.0 && omega_b.is_finite()) {
            return Err(invalid(
                "average index and Bragg frequency must be positive",
            ));
        }
        Ok(Self {
            kappa,
            length,
            n_bar,
            omega_b,
        })
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_bar(&self) -> f64 {
        self.n_bar
    }

    pub fn omega_b(&self) -> f64 {
        self.omega_b
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.kappa, length, self.n_bar, self.omega_b)
    }

    pub fn detuning(&self, omega: f64) -> Result<f64> {
        let delta = self.n_bar * (omega - self.omega_b);
        let limit = MAX_DETUNING * self.omega_b;
        if delta.abs() >= limit {
            return Err(Error::DetuningOutOfRange {
                detuning: delta,
                limit,
            });
        }
        Ok(delta)
    }

    fn gamma(&self, delta: f64) -> Complex64 {
        Complex64::new(self.kappa * self.kappa - delta * delta, 0.0).sqrt()
    }

    /// Forward and backward envelopes at `z` for unit forward input; `B(L) = 0`.
    pub fn envelopes(&self, omega: f64, z: f64) -> Result<(Complex64, Complex64)> {
        let delta = self.detuning(omega)?;
        let g = self.gamma(delta);
        let i = Complex64::i();
        let den = self.denominator(delta, g);
        let u = self.length - z;
        let sc = u * sinhc(g * u);
        let a = ((g * u).cosh() - i * delta * sc) / den;
        let b = i * self.kappa * sc / den;
        Ok((a, b))
    }

    fn denominator(&self, delta: f64, g: Complex64) -> Complex64 {
        let l = self.length;
        (g * l).cosh() - Complex64::i() * delta * l * sinhc(g * l)
    }

    /// Closed-form `(t, r)`; `t` includes the carrier propagation phase `n̄ω_B L`.
    pub fn amplitudes(&self, omega: f64) -> Result<(Complex64, Complex64)> {
        let (a, _) = self.envelopes(omega, self.length)?;
        let (_, r) = self.envelopes(omega, 0.0)?;
        let carrier = Complex64::from_polar(1.0, self.n_bar * self.omega_b * self.length);
        Ok((a * carrier, r))
    }

    /// Stored energy per unit input power, `n̄ ∫ (|A|² + |B|²) dz`, from the envelopes.
    pub fn stored_energy(&self, omega: f64) -> Result<f64> {
        self.detuning(omega)?;
        let integral = integrate(
            |z| {
                let (a, b) = self
                    .envelopes(omega, z)
                    .expect("detuning already validated");
                a.norm_sqr() + b.norm_sqr()
            },
            0.0,
            self.length,
            1e-12,
        )?;
        Ok(self.n_bar * integral)
    }

    /// Period of the grating, `π/(n̄ ω_B)`.
    pub fn period(&self) -> f64 {
        PI / (self.n_bar * self.omega_b)
    }

    /// Two-layer quarter-wave stack with the same Bragg frequency and midgap opacity.
    ///
    /// The stack has `N = round(L/Λ)` periods of index ratio `ρ = exp(κL/N)`, whose
    /// midgap transmission is exactly `sech(κL)`; the harmonic mean of the two
    /// indices is `n̄` so the period is `Λ`. It is embedded in `n̄`.
    pub fn equivalent_stack(&self) -> Result<LayeredStack> {
        let periods = (self.length / self.period()).round().max(1.0) as usize;
        let rho = (self.kappa * self.length / periods as f64).exp();
        let n_low = self.n_bar * (1.0 + rho) / (2.0 * rho);
        let n_high = rho * n_low;
        let layer = |n: f64| Layer {
            n,
            d: FRAC_PI_2 / (n * self.omega_b),
        };
        let layers = (0..periods)
            .flat_map(|_| [layer(n_high), layer(n_low)])
            .collect();
        LayeredStack::new(layers, self.n_bar, self.n_bar)
    }
}

/// Coupled-mode response of the grating on `grid`.
pub fn grating_response(grating: &UniformGrating, grid: &FrequencyGrid) -> Result<ComplexResponse> {
    ComplexResponse::try_from_fn(*grid, |w| grating.amplitudes(w))
}
