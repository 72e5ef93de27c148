use crate::error::{invalid, Error, Result};

/// Time of the maximum of a uniformly sampled, nonnegative series.
///
/// The three samples around the discrete maximum are fitted with a parabola in
/// `ln f` when all three are positive (exact for Gaussian peaks) and in `f`
/// otherwise.
pub fn locate_peak(samples: &[f64], t0: f64, dt: f64) -> Result<f64> {
    if samples.len() < 3 {
        return Err(invalid("peak search needs at least three samples"));
    }
    if !(dt > 0.0) {
        return Err(invalid("sample spacing must be positive"));
    }
    let (j, &max) = samples
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    if samples.iter().all(|&s| s == max) {
        return Err(Error::FlatSignal);
    }
    if j == 0 || j == samples.len() - 1 {
        return Err(Error::PeakAtBoundary);
    }
    let (a, b, c) = (samples[j - 1], max, samples[j + 1]);
    let offset = if a > 0.0 && c > 0.0 {
        vertex(a.ln(), b.ln(), c.ln())
    } else {
        vertex(a, b, c)
    };
    Ok(t0 + (j as f64 + offset) * dt)
}

/// Vertex position of the parabola through `(-1, a)`, `(0, b)`, `(1, c)`.
fn vertex(a: f64, b: f64, c: f64) -> f64 {
    let curvature = a - 2.0 * b + c;
    if curvature >= 0.0 {
        return 0.0;
    }
    0.5 * (a - c) / curvature
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_peak() {
        let s: Vec<f64> = (0..30)
            .map(|k| (-(0.5 * k as f64 - 7.3f64).powi(2)).exp())
            .collect();
        let t = locate_peak(&s, 0.0, 0.5).unwrap();
        assert!((t - 7.3).abs() < 1e-3, "{t}");
    }

    #[test]
    fn single_spike() {
        let mut s = vec![0.0; 9];
        s[4] = 1.0;
        assert_eq!(locate_peak(&s, 1.0, 0.25).unwrap(), 2.0);
    }

    #[test]
    fn asymmetric_pulse_matches_oversampled_max() {
        // t²·e^{-t}, peak at t = 2; oracle is a brute-force max on a 100× finer grid.
        let f = |t: f64| t * t * (-t).exp();
        let dt = 0.05;
        let s: Vec<f64> = (0..200).map(|k| f(0.013 + k as f64 * dt)).collect();
        let got = locate_peak(&s, 0.013, dt).unwrap();
        let fine = dt / 100.0;
        let oracle = (0..20000)
            .map(|k| 0.013 + k as f64 * fine)
            .max_by(|a, b| f(*a).total_cmp(&f(*b)))
            .unwrap();
        assert!((got - oracle).abs() < 1e-3, "{got} vs {oracle}");
    }

    #[test]
    fn boundary_and_flat() {
        assert_eq!(
            locate_peak(&[3.0, 2.0, 1.0], 0.0, 1.0),
            Err(Error::PeakAtBoundary)
        );
        assert_eq!(
            locate_peak(&[1.0, 2.0, 3.0], 0.0, 1.0),
            Err(Error::PeakAtBoundary)
        );
        assert_eq!(locate_peak(&[2.0; 6], 0.0, 1.0), Err(Error::FlatSignal));
    }
}
