use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use tunnelab::photonic::{
    group_delay, stack_response, stored_energy, Layer, LayeredStack, UniformGrating,
};
use tunnelab::quantum::{scatter, QuantumBarrier};
use tunnelab::spectral::{integrate, locate_peak, phase_derivative, FrequencyGrid, UnwrappedPhase};
use tunnelab::timedomain::{propagate_spectral, PulseEnvelope};

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 128,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn layers(max: usize) -> impl Strategy<Value = Vec<Layer>> {
    prop::collection::vec((1.0f64..3.5, 0.01f64..0.8), 1..max)
        .prop_map(|v| v.into_iter().map(|(n, d)| Layer { n, d }).collect())
}

fn thin_layers() -> impl Strategy<Value = Vec<Layer>> {
    prop::collection::vec((1.0f64..3.0, 0.01f64..0.3), 1..6)
        .prop_map(|v| v.into_iter().map(|(n, d)| Layer { n, d }).collect())
}

fn palindrome(half: Vec<Layer>) -> LayeredStack {
    let mut all = half.clone();
    all.extend(half.iter().rev().skip(1).copied());
    LayeredStack::in_vacuum(all).unwrap()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn quantum_flux_is_conserved(v0 in 0.1f64..10.0, length in 0.01f64..5.0, frac in 0.001f64..0.999) {
        let b = QuantumBarrier::new(v0, length).unwrap();
        let s = scatter(&b, frac * v0).unwrap();
        prop_assert!(s.flux_defect() < 1e-12);
    }

    #[test]
    fn stack_flux_is_conserved(ls in layers(40), n_in in 1.0f64..2.0, n_out in 1.0f64..2.0, w in 0.1f64..20.0) {
        let s = LayeredStack::new(ls, n_in, n_out).unwrap();
        let (t, r) = s.amplitudes(w);
        prop_assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn transmission_is_reciprocal(ls in layers(20), n_in in 1.0f64..2.0, n_out in 1.0f64..2.0, w in 0.1f64..20.0) {
        let s = LayeredStack::new(ls, n_in, n_out).unwrap();
        let (t, _) = s.amplitudes(w);
        let (t_rev, _) = s.reversed().amplitudes(w);
        prop_assert!((t - t_rev).norm() < 1e-10);
    }

    #[test]
    fn symmetric_stack_delay_is_stored_energy(half in layers(8), w in 1.0f64..6.0) {
        let s = palindrome(half);
        let tau = group_delay(&s, w).unwrap();
        let u = stored_energy(&s, w).unwrap().u_per_pin;
        prop_assert!((tau / u - 1.0).abs() < 1e-6, "{} vs {}", tau, u);
    }

    #[test]
    fn grating_flux_is_conserved(kappa in 0.0f64..3.0, length in 0.1f64..10.0, frac in -0.13f64..0.13) {
        let g = UniformGrating::new(kappa, length, 1.5, 10.0).unwrap();
        let (t, r) = g.amplitudes(10.0 * (1.0 + frac)).unwrap();
        prop_assert!((t.norm_sqr() + r.norm_sqr() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quadratic_phase_derivative(a in -10.0f64..10.0, b in -10.0f64..10.0, c in -10.0f64..10.0) {
        let g = FrequencyGrid::centered(3.0, 0.01, 21).unwrap();
        let p = UnwrappedPhase::from_fn(g, |w| a + b * w + c * w * w);
        let d = phase_derivative(&p, 0.0).unwrap();
        prop_assert!((d.value - b).abs() < 1e-9);
    }

    #[test]
    fn quintic_is_integrated_exactly(c in prop::array::uniform6(-5.0f64..5.0), a in -2.0f64..0.0, b in 0.1f64..2.0) {
        let f = |x: f64| c.iter().rev().fold(0.0, |acc, k| acc * x + k);
        let prim = |x: f64| c.iter().enumerate().map(|(j, k)| k * x.powi(j as i32 + 1) / (j as f64 + 1.0)).sum::<f64>();
        let exact = prim(b) - prim(a);
        let v = integrate(f, a, b, 1e-13).unwrap();
        prop_assert!((v - exact).abs() < 1e-11 * (1.0 + exact.abs()));
    }

    #[test]
    fn gaussian_peak_is_located_exactly(center in 3.0f64..7.0, width in 0.3f64..2.0) {
        let dt = 0.1;
        let s: Vec<f64> = (0..100).map(|k| (-((k as f64 * dt - center) / width).powi(2)).exp()).collect();
        let t = locate_peak(&s, 0.0, dt).unwrap();
        prop_assert!((t - center).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..config() })]

    #[test]
    fn pulse_energy_is_conserved(ls in thin_layers(), carrier in 2.0f64..8.0, bandwidth in 0.005f64..0.05) {
        let s = LayeredStack::in_vacuum(ls).unwrap();
        let p = PulseEnvelope::gaussian(carrier, bandwidth, 1024).unwrap();
        let out = propagate_spectral(&stack_response(&s, &p.spectral_grid()), &p).unwrap();
        prop_assert!(out.energy_defect() < 1e-8);
    }
}

#[test]
fn quarter_wave_midgap_transmission_is_real_up_to_carrier() {
    // Symmetric quarter-wave stacks have a midgap phase that is a multiple of π/2 per layer.
    let w0 = 2.0 * PI;
    let s = LayeredStack::quarter_wave(2.0, 1.5, 9, w0).unwrap();
    let (t, _) = s.amplitudes(w0);
    let quarter_turns = t.arg() / (PI / 2.0);
    assert!((quarter_turns - quarter_turns.round()).abs() < 1e-10);
    assert!(t.norm() < 1.0 && t != Complex64::new(0.0, 0.0));
}
