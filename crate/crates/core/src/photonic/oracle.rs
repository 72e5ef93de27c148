//! Test-only oracle: direct solution of the interface conditions.

use num_complex::Complex64;

use super::stack::LayeredStack;

pub struct OracleSolution {
    pub r: Complex64,
    /// Field transmission amplitude at the exit plane.
    pub t: Complex64,
    /// Forward/backward amplitudes per layer, phase origin at the layer entry.
    pub waves: Vec<(Complex64, Complex64)>,
}

impl OracleSolution {
    /// Field `(E, H)` at `z` for unit incident field.
    pub fn field(&self, stack: &LayeredStack, omega: f64, z: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let mut start = 0.0;
        for (l, &(a, b)) in stack.layers().iter().zip(&self.waves) {
            if z <= start + l.d {
                let s = z - start;
                let f = (i * l.n * omega * s).exp();
                return (a * f + b / f, l.n * (a * f - b / f));
            }
            start += l.d;
        }
        panic!("z outside the stack");
    }
}

/// Independent oracle: unknown forward/backward amplitudes in every layer,
/// fixed by E and H continuity at each interface, solved as one dense system.
pub fn boundary_system_oracle(stack: &LayeredStack, omega: f64) -> OracleSolution {
    let layers = stack.layers();
    let m = layers.len();
    // Unknowns: r, (a_j, b_j) per layer with phase origin at layer entry, t.
    let n_unk = 2 * m + 2;
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::i();
    let mut a = vec![vec![zero; n_unk + 1]; n_unk];
    let mut row = 0;
    let mut put = |row: usize, col: usize, v: Complex64| a[row][col] += v;
    // Entry interface: 1 + r = a_0 + b_0 ; n_in(1 − r) = n_0 (a_0 − b_0).
    let n0 = layers[0].n;
    put(row, 0, one);
    put(row, 1, -one);
    put(row, 2, -one);
    put(row, n_unk, -one);
    row += 1;
    put(row, 0, Complex64::new(-stack.n_in(), 0.0));
    put(row, 1, Complex64::new(-n0, 0.0));
    put(row, 2, Complex64::new(n0, 0.0));
    put(row, n_unk, Complex64::new(-stack.n_in(), 0.0));
    row += 1;
    for j in 0..m {
        let l = layers[j];
        let ph = (i * l.n * omega * l.d).exp();
        let (ej, hj) = (1 + 2 * j, 2 + 2 * j);
        if j + 1 < m {
            let nn = layers[j + 1].n;
            put(row, ej, ph);
            put(row, hj, 1.0 / ph);
            put(row, ej + 2, -one);
            put(row, hj + 2, -one);
            row += 1;
            put(row, ej, l.n * ph);
            put(row, hj, -l.n / ph);
            put(row, ej + 2, Complex64::new(-nn, 0.0));
            put(row, hj + 2, Complex64::new(nn, 0.0));
            row += 1;
        } else {
            put(row, ej, ph);
            put(row, hj, 1.0 / ph);
            put(row, n_unk - 1, -one);
            row += 1;
            put(row, ej, l.n * ph);
            put(row, hj, -l.n / ph);
            put(row, n_unk - 1, Complex64::new(-stack.n_out(), 0.0));
            row += 1;
        }
    }
    for col in 0..n_unk {
        let piv = (col..n_unk)
            .max_by(|x, y| a[*x][col].norm().total_cmp(&a[*y][col].norm()))
            .unwrap();
        a.swap(col, piv);
        for rr in 0..n_unk {
            if rr != col {
                let f = a[rr][col] / a[col][col];
                if f != zero {
                    for c in col..=n_unk {
                        let v = a[col][c];
                        a[rr][c] -= f * v;
                    }
                }
            }
        }
    }
    let sol = |k: usize| a[k][n_unk] / a[k][k];
    OracleSolution {
        r: sol(0),
        t: sol(n_unk - 1),
        waves: (0..m).map(|j| (sol(1 + 2 * j), sol(2 + 2 * j))).collect(),
    }
}
