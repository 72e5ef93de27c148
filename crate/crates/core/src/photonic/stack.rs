use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::spectral::{ComplexResponse, FrequencyGrid};

/// Homogeneous dielectric layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    pub n: f64,
    pub d: f64,
}

/// Lossless multilayer at normal incidence, `c = 1`, vacuum impedance 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayeredStack {
    layers: Vec<Layer>,
    n_in: f64,
    n_out: f64,
}

fn positive(x: f64) -> bool {
    x > 0.0 && x.is_finite()
}

impl LayeredStack {
    pub fn new(layers: Vec<Layer>, n_in: f64, n_out: f64) -> Result<Self> {
        if !positive(n_in) || !positive(n_out) {
            return Err(invalid("surrounding indices must be positive"));
        }
        if let Some((j, l)) = layers
            .iter()
            .enumerate()
            .find(|(_, l)| !positive(l.n) || !positive(l.d))
        {
            return Err(invalid(format!(
                "layer {j} has invalid index {} or thickness {}",
                l.n, l.d
            )));
        }
        Ok(Self {
            layers,
            n_in,
            n_out,
        })
    }

    /// Layers in vacuum.
    pub fn in_vacuum(layers: Vec<Layer>) -> Result<Self> {
        Self::new(layers, 1.0, 1.0)
    }

    /// A single vacuum layer of the given thickness.
    pub fn vacuum(length: f64) -> Result<Self> {
        Self::in_vacuum(vec![Layer { n: 1.0, d: length }])
    }

    /// `H L H … ` quarter-wave stack at `omega0`, starting and (for odd counts) ending with the high index.
    pub fn quarter_wave(n_high: f64, n_low: f64, count: usize, omega0: f64) -> Result<Self> {
        if !positive(omega0) {
            return Err(invalid("design frequency must be positive"));
        }
        let layers = (0..count)
            .map(|j| {
                let n = if j % 2 == 0 { n_high } else { n_low };
                Layer {
                    n,
                    d: FRAC_PI_2 / (n * omega0),
                }
            })
            .collect();
        Self::in_vacuum(layers)
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn n_in(&self) -> f64 {
        self.n_in
    }

    pub fn n_out(&self) -> f64 {
        self.n_out
    }

    pub fn total_length(&self) -> f64 {
        self.layers.iter().map(|l| l.d).sum()
    }

    /// Same layers between different surrounding media.
    pub fn with_surroundings(&self, n_in: f64, n_out: f64) -> Result<Self> {
        Self::new(self.layers.clone(), n_in, n_out)
    }

    /// Same layers in the opposite order, with the surrounding media swapped.
    pub fn reversed(&self) -> Self {
        let mut layers = self.layers.clone();
        layers.reverse();
        Self {
            layers,
            n_in: self.n_out,
            n_out: self.n_in,
        }
    }

    /// Concatenation of `self` followed by `other` (surroundings from the outer ends).
    pub fn then(&self, other: &Self) -> Self {
        let mut layers = self.layers.clone();
        layers.extend_from_slice(&other.layers);
        Self {
            layers,
            n_in: self.n_in,
            n_out: other.n_out,
        }
    }
}

/// 2×2 characteristic matrix mapping `(E, H)` at a layer's entry to its exit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharMatrix(pub [[Complex64; 2]; 2]);

impl CharMatrix {
    pub fn identity() -> Self {
        let (one, zero) = (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0));
        Self([[one, zero], [zero, one]])
    }

    pub fn layer(layer: &Layer, omega: f64) -> Self {
        let delta = layer.n * layer.d * omega;
        let (s, c) = delta.sin_cos();
        let i = Complex64::i();
        Self([
            [Complex64::new(c, 0.0), i * (s / layer.n)],
            [i * (layer.n * s), Complex64::new(c, 0.0)],
        ])
    }

    /// `self · rhs`: apply `rhs` first.
    pub fn after(&self, rhs: &Self) -> Self {
        let (a, b) = (&self.0, &rhs.0);
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self(m)
    }

    pub fn apply(&self, e: Complex64, h: Complex64) -> (Complex64, Complex64) {
        let m = &self.0;
        (m[0][0] * e + m[0][1] * h, m[1][0] * e + m[1][1] * h)
    }
}

impl LayeredStack {
    pub fn matrix(&self, omega: f64) -> CharMatrix {
        self.layers.iter().fold(CharMatrix::identity(), |acc, l| {
            CharMatrix::layer(l, omega).after(&acc)
        })
    }

    /// Field amplitudes `(t, r)` for unit incident field: `E = t` at the exit, `E = 1 + r` at the entry.
    pub fn field_amplitudes(&self, omega: f64) -> (Complex64, Complex64) {
        let m = self.matrix(omega).0;
        let (ni, no) = (self.n_in, self.n_out);
        let t = 2.0 * ni / (ni * m[1][1] - ni * no * m[0][1] + no * m[0][0] - m[1][0]);
        let r = t * (m[1][1] - m[0][1] * no) - 1.0;
        (t, r)
    }

    /// Flux-normalized `(t, r)` at one frequency.
    pub fn amplitudes(&self, omega: f64) -> (Complex64, Complex64) {
        let (t, r) = self.field_amplitudes(omega);
        (t * (self.n_out / self.n_in).sqrt(), r)
    }

    pub fn transmittance(&self, omega: f64) -> f64 {
        self.amplitudes(omega).0.norm_sqr()
    }
}

/// Transfer-matrix response of the stack sampled on `grid`.
pub fn stack_response(stack: &LayeredStack, grid: &FrequencyGrid) -> ComplexResponse {
    ComplexResponse::from_fn(*grid, |w| stack.amplitudes(w))
}
