//! Scattering of a particle on a one-dimensional rectangular barrier.
//!
//! Natural units `ħ = m = 1`, so `E = k²/2`, the incident speed is `k`, and the
//! evanescent decay constant is `κ = sqrt(2(V₀ − E))`. The transmitted wave is
//! written `t·exp(ik(x − L))`, which makes `t = 1` for a zero-length barrier and
//! `t = exp(ikL)` for free propagation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::spectral::{integrate, phase_derivative, unwrap_phase, ComplexResponse, FrequencyGrid};

/// Half-width of the energy grid used for `d(arg t)/dE`, relative to `E`.
const ENERGY_HALF_WIDTH: f64 = 1e-4;
const ENERGY_SAMPLES: usize = 9;
const DWELL_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumBarrier {
    v0: f64,
    length: f64,
}

impl QuantumBarrier {
    pub fn new(v0: f64, length: f64) -> Result<Self> {
        if !(v0 > 0.0 && v0.is_finite()) {
            return Err(invalid(format!(
                "barrier height must be positive, got {v0}"
            )));
        }
        if !(length >= 0.0 && length.is_finite()) {
            return Err(invalid(format!(
                "barrier length must be nonnegative, got {length}"
            )));
        }
        Ok(Self { v0, length })
    }

    /// Barrier whose length gives opacity `κL` at `energy`.
    pub fn with_opacity(v0: f64, energy: f64, kappa_length: f64) -> Result<Self> {
        if !(energy > 0.0 && energy < v0) {
            return Err(invalid("opacity is defined only in the tunneling regime"));
        }
        let kappa = (2.0 * (v0 - energy)).sqrt();
        Self::new(v0, kappa_length / kappa)
    }

    pub fn v0(&self) -> f64 {
        self.v0
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn with_length(&self, length: f64) -> Result<Self> {
        Self::new(self.v0, length)
    }
}

/// Which energies a computation accepts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `0 < E < V₀`; anything else is an error.
    Tunneling,
    /// Any `E > 0` except `E = V₀`, via analytic continuation `κ → i·sqrt(2(E − V₀))`.
    /// Used for free-propagation limits.
    Continued,
}

/// Stationary scattering solution at one energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScatterState {
    pub barrier: QuantumBarrier,
    pub energy: f64,
    pub k: f64,
    /// Real in the tunneling regime, purely imaginary above the barrier.
    pub kappa: Complex64,
    pub t: Complex64,
    pub r: Complex64,
}

fn check_energy(barrier: &QuantumBarrier, energy: f64, regime: Regime) -> Result<()> {
    if !(energy > 0.0) || !energy.is_finite() {
        return Err(Error::NonPositiveEnergy(energy));
    }
    let above = match regime {
        Regime::Tunneling => energy >= barrier.v0,
        Regime::Continued => energy == barrier.v0,
    };
    if above {
        return Err(Error::AboveBarrier {
            energy,
            v0: barrier.v0,
        });
    }
    Ok(())
}

/// Tunneling-regime scattering state.
pub fn scatter(barrier: &QuantumBarrier, energy: f64) -> Result<ScatterState> {
    scatter_in(barrier, energy, Regime::Tunneling)
}

pub fn scatter_in(barrier: &QuantumBarrier, energy: f64, regime: Regime) -> Result<ScatterState> {
    check_energy(barrier, energy, regime)?;
    let k = (2.0 * energy).sqrt();
    let kappa = Complex64::new(2.0 * (barrier.v0 - energy), 0.0).sqrt();
    let i = Complex64::i();
    let kl = kappa * barrier.length;
    // Matching ψ = t[cosh κ(x−L) + (ik/κ) sinh κ(x−L)] to the incident side at x = 0.
    let t = 1.0 / (kl.cosh() + i * (kappa * kappa - k * k) / (2.0 * k * kappa) * kl.sinh());
    let r = t * (kl.cosh() - i * k / kappa * kl.sinh()) - 1.0;
    Ok(ScatterState {
        barrier: *barrier,
        energy,
        k,
        kappa,
        t,
        r,
    })
}

impl ScatterState {
    /// Wavefunction for unit-amplitude incidence from the left.
    pub fn psi(&self, x: f64) -> Complex64 {
        let i = Complex64::i();
        let l = self.barrier.length;
        if x < 0.0 {
            (i * self.k * x).exp() + self.r * (-i * self.k * x).exp()
        } else if x <= l {
            self.psi_inside(x)
        } else {
            self.t * (i * self.k * (x - l)).exp()
        }
    }

    fn psi_inside(&self, x: f64) -> Complex64 {
        let s = self.kappa * (x - self.barrier.length);
        self.t * (s.cosh() + Complex64::i() * self.k / self.kappa * s.sinh())
    }

    fn dpsi_inside(&self, x: f64) -> Complex64 {
        let s = self.kappa * (x - self.barrier.length);
        self.t * (self.kappa * s.sinh() + Complex64::i() * self.k * s.cosh())
    }

    /// Largest mismatch of `ψ` and `ψ'` between the analytic forms of adjacent
    /// regions, evaluated at both interfaces.
    pub fn matching_residual(&self) -> f64 {
        let i = Complex64::i();
        let k = self.k;
        let l = self.barrier.length;
        let left = 1.0 + self.r;
        let dleft = i * k * (1.0 - self.r);
        let right = self.t;
        let dright = i * k * self.t;
        [
            (left - self.psi_inside(0.0)).norm(),
            (dleft - self.dpsi_inside(0.0)).norm(),
            (right - self.psi_inside(l)).norm(),
            (dright - self.dpsi_inside(l)).norm(),
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn flux_defect(&self) -> f64 {
        (self.t.norm_sqr() + self.r.norm_sqr() - 1.0).abs()
    }
}

/// Group delay `d(arg t)/dE` in the tunneling regime.
pub fn group_delay(barrier: &QuantumBarrier, energy: f64) -> Result<f64> {
    group_delay_in(barrier, energy, Regime::Tunneling)
}

pub fn group_delay_in(barrier: &QuantumBarrier, energy: f64, regime: Regime) -> Result<f64> {
    check_energy(barrier, energy, regime)?;
    let grid = FrequencyGrid::centered(energy, ENERGY_HALF_WIDTH * energy, ENERGY_SAMPLES)?;
    if regime == Regime::Tunneling && grid.omega(ENERGY_SAMPLES - 1) >= barrier.v0 {
        return Err(Error::AboveBarrier {
            energy: grid.omega(ENERGY_SAMPLES - 1),
            v0: barrier.v0,
        });
    }
    let resp = ComplexResponse::try_from_fn(grid, |e| {
        let s = scatter_in(barrier, e, regime)?;
        Ok((s.t, s.r))
    })?;
    let phase = unwrap_phase(&resp)?;
    Ok(phase_derivative(&phase, 0.0)?.value)
}

/// Dwell time `(1/k)∫₀ᴸ |ψ|² dx` in the tunneling regime.
pub fn dwell_time(barrier: &QuantumBarrier, energy: f64) -> Result<f64> {
    dwell_time_in(barrier, energy, Regime::Tunneling)
}

pub fn dwell_time_in(barrier: &QuantumBarrier, energy: f64, regime: Regime) -> Result<f64> {
    let s = scatter_in(barrier, energy, regime)?;
    let stored = integrate(
        |x| s.psi_inside(x).norm_sqr(),
        0.0,
        barrier.length,
        DWELL_TOL,
    )?;
    Ok(stored / s.k)
}

/// Delay times at one energy. `L/τ_g` is reported as an apparent speed only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DelayReport {
    pub tau_g: f64,
    pub tau_d: f64,
    /// Self-interference delay, `τ_g − τ_d`.
    pub tau_i: f64,
    /// Free transit time `L/k` at the incident speed.
    pub front_time: f64,
    /// `L/τ_g`; absent for a zero-length barrier.
    pub apparent_speed: Option<f64>,
    /// Set when `L/τ_g` exceeds the incident speed `k`.
    pub apparent_superluminal: bool,
}

pub fn delay_report(barrier: &QuantumBarrier, energy: f64) -> Result<DelayReport> {
    let tau_g = group_delay(barrier, energy)?;
    let tau_d = dwell_time(barrier, energy)?;
    let k = (2.0 * energy).sqrt();
    let l = barrier.length;
    let apparent_speed = (l > 0.0).then(|| l / tau_g);
    Ok(DelayReport {
        tau_g,
        tau_d,
        tau_i: tau_g - tau_d,
        front_time: l / k,
        apparent_speed,
        apparent_superluminal: apparent_speed.is_some_and(|v| v > k),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Solves the four matching conditions as a dense linear system.
    /// Unknowns: r, A, B (inside ψ = A e^{κx} + B e^{−κx}), t_std (ψ = t_std e^{ikx}, x ≥ L).
    fn matching_oracle(v0: f64, e: f64, l: f64) -> [Complex64; 4] {
        let k = (2.0 * e).sqrt();
        let q = (2.0 * (v0 - e)).sqrt();
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let i = Complex64::i();
        let (ep, em) = ((q * l).exp(), (-q * l).exp());
        let eik = (i * k * l).exp();
        let mut m = [
            [
                c(1.0, 0.0),
                c(-1.0, 0.0),
                c(-1.0, 0.0),
                c(0.0, 0.0),
                c(-1.0, 0.0),
            ],
            [-i * k, c(-q, 0.0), c(q, 0.0), c(0.0, 0.0), -i * k],
            [c(0.0, 0.0), c(ep, 0.0), c(em, 0.0), -eik, c(0.0, 0.0)],
            [
                c(0.0, 0.0),
                c(q * ep, 0.0),
                c(-q * em, 0.0),
                -i * k * eik,
                c(0.0, 0.0),
            ],
        ];
        for col in 0..4 {
            let piv = (col..4)
                .max_by(|a, b| m[*a][col].norm().total_cmp(&m[*b][col].norm()))
                .unwrap();
            m.swap(col, piv);
            for row in 0..4 {
                if row != col {
                    let f = m[row][col] / m[col][col];
                    for j in col..5 {
                        let v = m[col][j];
                        m[row][j] -= f * v;
                    }
                }
            }
        }
        let x: Vec<Complex64> = (0..4).map(|j| m[j][4] / m[j][j]).collect();
        [x[0], x[1], x[2], x[3]]
    }

    /// Closed-form d(arg t)/dE from differentiating −atan(a·tanh κL) by hand.
    fn analytic_group_delay(v0: f64, e: f64, l: f64) -> f64 {
        let k = (2.0 * e).sqrt();
        let q = (2.0 * (v0 - e)).sqrt();
        let a = (q / k - k / q) / 2.0;
        let da = 0.5 * (-1.0 / (k * q) - q / k.powi(3) - 1.0 / (k * q) - k / q.powi(3));
        let th = (q * l).tanh();
        let sech2 = 1.0 - th * th;
        let dq = -1.0 / q;
        -(da * th + a * l * dq * sech2) / (1.0 + a * a * th * th)
    }

    #[test]
    fn zero_length_is_transparent() {
        let b = QuantumBarrier::new(2.0, 0.0).unwrap();
        let s = scatter(&b, 1.0).unwrap();
        assert!((s.t - 1.0).norm() < 1e-15);
        assert!(s.r.norm() < 1e-15);
        assert_eq!(group_delay(&b, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn opaque_amplitude_matches_linear_system() {
        let b = QuantumBarrier::new(2.0, 3.0).unwrap();
        let s = scatter(&b, 1.0).unwrap();
        let [r, _, _, t_std] = matching_oracle(2.0, 1.0, 3.0);
        let t_anchor = t_std * (Complex64::i() * s.k * 3.0).exp();
        assert!((s.t - t_anchor).norm() < 1e-12 * s.t.norm());
        assert!((s.r - r).norm() < 1e-12);
        assert!((s.t.norm() - 1.0 / (3.0 * 2f64.sqrt()).cosh()).abs() < 1e-15);
        assert!((s.t.norm() - 2.87e-2).abs() < 5e-5);
    }

    #[test]
    fn regime_errors() {
        let b = QuantumBarrier::new(2.0, 1.0).unwrap();
        assert!(matches!(scatter(&b, 2.0), Err(Error::AboveBarrier { .. })));
        assert!(matches!(scatter(&b, 3.0), Err(Error::AboveBarrier { .. })));
        assert!(matches!(scatter(&b, 0.0), Err(Error::NonPositiveEnergy(_))));
        assert!(matches!(
            scatter(&b, -1.0),
            Err(Error::NonPositiveEnergy(_))
        ));
        assert!(scatter_in(&b, 3.0, Regime::Continued).is_ok());
        assert!(matches!(
            scatter_in(&b, 2.0, Regime::Continued),
            Err(Error::AboveBarrier { .. })
        ));
        // Stencil would poke above the barrier top.
        assert!(matches!(
            group_delay(&b, 2.0 - 1e-6),
            Err(Error::AboveBarrier { .. })
        ));
        assert!(QuantumBarrier::new(0.0, 1.0).is_err());
        assert!(QuantumBarrier::new(1.0, -1.0).is_err());
    }

    #[test]
    fn wavefunction_is_continuous() {
        for (v0, e, l) in [(2.0, 1.0, 3.0), (5.0, 0.3, 0.7), (1.0, 0.99, 10.0)] {
            let s = scatter(&QuantumBarrier::new(v0, l).unwrap(), e).unwrap();
            assert!(s.matching_residual() < 1e-10, "{}", s.matching_residual());
            // Piecewise evaluation agrees across the interfaces too.
            let eps = 1e-9;
            assert!((s.psi(-eps) - s.psi(eps)).norm() < 1e-7);
            assert!((s.psi(l - eps) - s.psi(l + eps)).norm() < 1e-7);
        }
    }

    #[test]
    fn group_delay_matches_symbolic_derivative() {
        let e = 1.0;
        let q = 2f64.sqrt();
        for kl in [1.0, 3.0, 20.0] {
            let l = kl / q;
            let got = group_delay(&QuantumBarrier::new(2.0, l).unwrap(), e).unwrap();
            let want = analytic_group_delay(2.0, e, l);
            assert!((got / want - 1.0).abs() < 1e-8, "κL={kl}: {got} vs {want}");
        }
        // Off the symmetric point too.
        let got = group_delay(&QuantumBarrier::new(3.0, 1.7).unwrap(), 0.4).unwrap();
        let want = analytic_group_delay(3.0, 0.4, 1.7);
        assert!((got / want - 1.0).abs() < 1e-8);
    }

    #[test]
    fn hartman_saturation() {
        let d10 = group_delay(&QuantumBarrier::with_opacity(2.0, 1.0, 10.0).unwrap(), 1.0).unwrap();
        let d20 = group_delay(&QuantumBarrier::with_opacity(2.0, 1.0, 20.0).unwrap(), 1.0).unwrap();
        assert!(((d10 - d20) / d20).abs() < 1e-6);
        // Saturated value 2/(kκ) with k = κ = √2.
        assert!((d20 - 1.0).abs() < 1e-8);
    }

    #[test]
    fn free_propagation_limit() {
        let b = QuantumBarrier::new(1e-9, 2.0).unwrap();
        let tau_g = group_delay_in(&b, 0.5, Regime::Continued).unwrap();
        assert!((tau_g - 2.0).abs() < 1e-6 * 2.0, "{tau_g}");
        let tau_d = dwell_time_in(&b, 0.5, Regime::Continued).unwrap();
        assert!((tau_d - 2.0).abs() < 1e-6, "{tau_d}");
    }

    #[test]
    fn dwell_time_matches_midpoint_oracle() {
        let (v0, e, l) = (2.0, 1.0, 3.0);
        let [_, a, b, _] = matching_oracle(v0, e, l);
        let q = (2.0 * (v0 - e)).sqrt();
        let k = (2.0 * e).sqrt();
        let n = 1_000_000;
        let h = l / n as f64;
        let sum: f64 = (0..n)
            .map(|j| {
                let x = (j as f64 + 0.5) * h;
                (a * (q * x).exp() + b * (-q * x).exp()).norm_sqr()
            })
            .sum();
        let oracle = sum * h / k;
        let got = dwell_time(&QuantumBarrier::new(v0, l).unwrap(), e).unwrap();
        assert!((got / oracle - 1.0).abs() < 1e-8, "{got} vs {oracle}");
    }

    #[test]
    fn dwell_time_saturates() {
        let taus: Vec<f64> = [5.0, 10.0, 20.0]
            .iter()
            .map(|&kl| {
                dwell_time(&QuantumBarrier::with_opacity(2.0, 1.0, kl).unwrap(), 1.0).unwrap()
            })
            .collect();
        // Approaches the opaque limit 2k/(κ(k² + κ²)) = 0.5 from below.
        assert!(taus[0] < taus[1] && taus[1] < taus[2], "{taus:?}");
        assert!((taus[2] - 0.5).abs() < 1e-12);
        assert!((taus[1] - taus[2]) / taus[2] < 1e-6);
        assert!(taus[2] > 0.0);
    }

    #[test]
    fn report_assembles_delays() {
        let b = QuantumBarrier::with_opacity(2.0, 1.0, 20.0).unwrap();
        let rep = delay_report(&b, 1.0).unwrap();
        assert_eq!(rep.tau_i, rep.tau_g - rep.tau_d);
        assert!(rep.tau_d > 0.0);
        let k = 2f64.sqrt();
        assert!(rep.apparent_speed.unwrap() > 10.0 * k);
        assert!(rep.apparent_superluminal);
        assert!((rep.front_time - b.length() / k).abs() < 1e-15);

        let empty = delay_report(&QuantumBarrier::new(2.0, 0.0).unwrap(), 1.0).unwrap();
        assert_eq!((empty.tau_g, empty.tau_d, empty.tau_i), (0.0, 0.0, 0.0));
        assert_eq!(empty.apparent_speed, None);
        assert!(!empty.apparent_superluminal);
    }
}
