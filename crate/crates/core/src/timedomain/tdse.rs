use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::quantum::QuantumBarrier;
use crate::spectral::locate_peak;

/// Grid points per inverse carrier wavenumber: `dx ≤ 1/(20·k₀)`.
const POINTS_PER_INVERSE_K: f64 = 20.0;
/// Default launch distance from the barrier entrance, in packet widths.
const LAUNCH_WIDTHS: f64 = 10.0;
/// Detector planes beyond the barrier exit, in packet widths.
const DETECTOR_WIDTHS: [f64; 2] = [5.0, 7.0];
/// Packet widths kept between any packet and the grid edge.
const EDGE_WIDTHS: f64 = 10.0;
/// Width of the edge zones whose probability is monitored, in packet widths.
const MONITOR_WIDTHS: f64 = 3.0;
const MONITOR_EVERY: usize = 500;
const NORM_TOL: f64 = 1e-8;
const BOUNDARY_TOL: f64 = 1e-10;
const OVERLAP_TOL: f64 = 1e-12;
/// Largest momentum spread, relative to `κ`, that counts as quasi-static.
const MAX_SPREAD: f64 = 0.05;

/// Gaussian packet with mean wavenumber `k0` and RMS momentum spread `delta_k`.
///
/// The packet is chirped so that, moving freely, it would be transform-limited
/// with its center at the barrier entrance `x = 0`; at `t = 0` it is centered
/// at `launch`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WavePacket {
    pub k0: f64,
    pub delta_k: f64,
    pub launch: f64,
}

impl WavePacket {
    pub fn new(k0: f64, delta_k: f64, launch: f64) -> Result<Self> {
        if !(k0 > 0.0 && delta_k > 0.0 && delta_k < k0) {
            return Err(invalid("packet needs 0 < delta_k < k0"));
        }
        if !(launch < 0.0) {
            return Err(invalid(
                "packet must be launched before the barrier (x < 0)",
            ));
        }
        Ok(Self {
            k0,
            delta_k,
            launch,
        })
    }

    /// Packet launched ten position widths before the barrier.
    pub fn quasi_static(k0: f64, delta_k: f64) -> Result<Self> {
        Self::new(k0, delta_k, -LAUNCH_WIDTHS * 0.5 / delta_k)
    }

    /// RMS position width at focus, `1/(2Δk)`.
    pub fn sigma(&self) -> f64 {
        0.5 / self.delta_k
    }

    fn width_at(&self, s: f64) -> f64 {
        let sigma = self.sigma();
        sigma * (1.0 + (s / (2.0 * sigma * sigma)).powi(2)).sqrt()
    }

    /// Free-particle wavefunction a time `s` after focus.
    fn free_psi(&self, x: f64, s: f64) -> Complex64 {
        let sigma2 = self.sigma().powi(2);
        let i = Complex64::i();
        let spread = 1.0 + i * s / (2.0 * sigma2);
        let shifted = x - self.k0 * s;
        (-shifted * shifted / (4.0 * sigma2 * spread) + i * self.k0 * x
            - i * 0.5 * self.k0 * self.k0 * s)
            .exp()
            / spread.sqrt()
    }

    fn focus_time(&self) -> f64 {
        -self.launch / self.k0
    }
}

/// Delay measured by direct integration, with the run diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TdseMeasurement {
    /// Barrier-run minus free-run arrival at the barrier exit plane, extrapolated
    /// from the two detector planes. Estimates `τ_g − L/k₀`.
    pub delay: f64,
    /// Barrier-run minus free-run peak arrival at the first detector plane.
    pub detector_delay: f64,
    /// First detector position.
    pub detector: f64,
    /// Largest `|‖ψ‖² − 1|` of the two runs at the end.
    pub norm_drift: f64,
    /// Largest probability seen in the monitored edge zones.
    pub boundary_level: f64,
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
}

/// Measures the delay of `packet` through `barrier` against a free run.
///
/// The packet energy must be below the barrier and its spread at most
/// `0.05·κ`.
pub fn tdse_oracle(barrier: &QuantumBarrier, packet: &WavePacket) -> Result<TdseMeasurement> {
    let energy = 0.5 * packet.k0 * packet.k0;
    if energy >= barrier.v0() {
        return Err(Error::AboveBarrier {
            energy,
            v0: barrier.v0(),
        });
    }
    let kappa = (2.0 * (barrier.v0() - energy)).sqrt();
    if packet.delta_k > MAX_SPREAD * kappa * (1.0 + 1e-12) {
        return Err(invalid(format!(
            "momentum spread {} exceeds {MAX_SPREAD}·κ = {}",
            packet.delta_k,
            MAX_SPREAD * kappa
        )));
    }
    tdse_delay(barrier.v0(), barrier.length(), packet)
}

/// As [`tdse_oracle`] without the quasi-static preconditions; `v0 = 0` is allowed.
pub fn tdse_delay(v0: f64, length: f64, packet: &WavePacket) -> Result<TdseMeasurement> {
    if !(v0 >= 0.0 && v0.is_finite() && length > 0.0 && length.is_finite()) {
        return Err(invalid("barrier needs v0 ≥ 0 and a positive length"));
    }
    let setup = Setup::new(length, packet)?;
    let barrier_potential = |x: f64| {
        let eps = 1e-9 * setup.dx;
        if x > eps && x < length - eps {
            v0
        } else if (x.abs() <= eps) || ((x - length).abs() <= eps) {
            0.5 * v0
        } else {
            0.0
        }
    };
    let (with_barrier, free) = rayon::join(|| setup.run(barrier_potential), || setup.run(|_| 0.0));
    let (with_barrier, free) = (with_barrier?, free?);

    let exit = |arrivals: &[f64; 2]| {
        let slope = (arrivals[1] - arrivals[0]) / (setup.detectors[1] - setup.detectors[0]);
        arrivals[0] - slope * (setup.detectors[0] - length)
    };
    Ok(TdseMeasurement {
        delay: exit(&with_barrier.arrivals) - exit(&free.arrivals),
        detector_delay: with_barrier.arrivals[0] - free.arrivals[0],
        detector: setup.detectors[0],
        norm_drift: with_barrier.norm_drift.max(free.norm_drift),
        boundary_level: with_barrier.boundary_level.max(free.boundary_level),
        dx: setup.dx,
        dt: setup.dt,
        steps: setup.steps,
    })
}

struct Setup {
    packet: WavePacket,
    dx: f64,
    dt: f64,
    steps: usize,
    /// Grid index of `x = 0`.
    origin: usize,
    points: usize,
    detectors: [f64; 2],
    detector_index: [usize; 2],
    monitor: usize,
}

struct RunOutcome {
    arrivals: [f64; 2],
    norm_drift: f64,
    boundary_level: f64,
}

impl Setup {
    fn new(length: f64, packet: &WavePacket) -> Result<Self> {
        let cells = (length * POINTS_PER_INVERSE_K * packet.k0).ceil();
        let dx = length / cells;
        let dt = dx * dx;
        let sigma = packet.sigma();
        let detectors_x = DETECTOR_WIDTHS.map(|w| length + w * sigma);
        let t_focus = packet.focus_time();
        // The later detector must see the whole transmitted peak go by.
        let travel =
            (detectors_x[1] + 6.0 * packet.width_at(detectors_x[1] / packet.k0)) / packet.k0;
        let t_end = t_focus + travel;
        let end_width = packet.width_at(travel);
        let launch_width = packet.width_at(-t_focus);
        let reach = packet.k0 * travel + EDGE_WIDTHS * end_width;
        let left = reach.max(-packet.launch + EDGE_WIDTHS * launch_width);
        let right = reach.max(length + EDGE_WIDTHS * end_width);
        let origin = (left / dx).ceil() as usize;
        let points = origin + (right / dx).ceil() as usize + 1;
        let detector_index = detectors_x.map(|x| origin + (x / dx).round() as usize);
        let detectors = detector_index.map(|j| (j as f64 - origin as f64) * dx);
        Ok(Self {
            packet: *packet,
            dx,
            dt,
            steps: (t_end / dt).ceil() as usize,
            origin,
            points,
            detectors,
            detector_index,
            monitor: ((MONITOR_WIDTHS * end_width / dx).ceil() as usize).min(points / 4),
        })
    }

    fn x(&self, j: usize) -> f64 {
        (j as f64 - self.origin as f64) * self.dx
    }

    fn initial_state(&self) -> Result<Vec<Complex64>> {
        let s = -self.packet.focus_time();
        let mut psi: Vec<Complex64> = (0..self.points)
            .map(|j| self.packet.free_psi(self.x(j), s))
            .collect();
        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx;
        let scale = 1.0 / norm.sqrt();
        psi.iter_mut().for_each(|v| *v *= scale);
        let overlap: f64 = psi[self.origin..].iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx;
        if overlap > OVERLAP_TOL {
            return Err(invalid(format!(
                "initial packet overlaps the barrier region ({overlap:e})"
            )));
        }
        Ok(psi)
    }

    /// Crank–Nicolson integration with Dirichlet walls.
    fn run(&self, potential: impl Fn(f64) -> f64) -> Result<RunOutcome> {
        let n = self.points;
        let mut psi = self.initial_state()?;
        let i = Complex64::i();
        // (1 + iHΔt/2) ψ' = (1 − iHΔt/2) ψ with H = −½∂² + V.
        let off = -i * self.dt / (4.0 * self.dx * self.dx);
        let diag: Vec<Complex64> = (0..n)
            .map(|j| 1.0 + i * 0.5 * self.dt * (1.0 / (self.dx * self.dx) + potential(self.x(j))))
            .collect();
        let mut upper = vec![Complex64::new(0.0, 0.0); n];
        let mut inv_pivot = vec![Complex64::new(0.0, 0.0); n];
        let mut prev = Complex64::new(0.0, 0.0);
        for j in 0..n {
            let pivot = diag[j] - off * prev;
            inv_pivot[j] = 1.0 / pivot;
            upper[j] = off * inv_pivot[j];
            prev = upper[j];
        }

        let mut forward = vec![Complex64::new(0.0, 0.0); n];
        let mut traces = [
            Vec::with_capacity(self.steps),
            Vec::with_capacity(self.steps),
        ];
        let mut boundary_level = 0.0f64;
        for step in 1..=self.steps {
            let mut y_prev = Complex64::new(0.0, 0.0);
            let mut left = Complex64::new(0.0, 0.0);
            for j in 0..n {
                let right = if j + 1 < n {
                    psi[j + 1]
                } else {
                    Complex64::new(0.0, 0.0)
                };
                let rhs = (2.0 - diag[j]) * psi[j] - off * (left + right);
                left = psi[j];
                y_prev = (rhs - off * y_prev) * inv_pivot[j];
                forward[j] = y_prev;
            }
            let mut next = Complex64::new(0.0, 0.0);
            for j in (0..n).rev() {
                next = forward[j] - upper[j] * next;
                psi[j] = next;
            }
            for (trace, &j) in traces.iter_mut().zip(&self.detector_index) {
                trace.push(psi[j].norm_sqr());
            }
            if step % MONITOR_EVERY == 0 || step == self.steps {
                let edge = |range: std::ops::Range<usize>| {
                    psi[range].iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx
                };
                boundary_level = boundary_level
                    .max(edge(0..self.monitor))
                    .max(edge(n - self.monitor..n));
            }
        }

        let norm: f64 = psi.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.dx;
        let norm_drift = (norm - 1.0).abs();
        if norm_drift > NORM_TOL {
            return Err(Error::NormDrift { drift: norm_drift });
        }
        if boundary_level > BOUNDARY_TOL {
            return Err(Error::BoundaryContamination {
                level: boundary_level,
            });
        }
        let arrival = |trace: &[f64]| locate_peak(trace, self.dt, self.dt);
        Ok(RunOutcome {
            arrivals: [arrival(&traces[0])?, arrival(&traces[1])?],
            norm_drift,
            boundary_level,
        })
    }
}
