use std::f64::consts::TAU;

use rayon::prelude::*;
use serde_json::{json, Value};
use tunnelab::analysis::{hartman_sweep, skc_report, BarrierFamily, SkcReport};
use tunnelab::photonic::{
    grating_group_delay, group_delay, stack_response, stopband, stored_energy, LayeredStack,
    Stopband, UniformGrating,
};
use tunnelab::quantum::{delay_report, scatter, QuantumBarrier};
use tunnelab::timedomain::{front_causality, propagate_spectral, FrontRamp, PulseEnvelope};
use tunnelab::Result;

use crate::config::{
    Experiment, ExperimentConfig, FamilyConfig, FrontConfig, GratingConfig, HartmanConfig,
    PulseConfig, QuantumConfig, SkcConfig, StackConfig, StackRunConfig,
};
use crate::units::Units;

/// One CSV field.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Text(&'static str),
}

impl Cell {
    /// Floats carry 17 significant digits so that they parse back to the same value.
    pub fn render(&self) -> String {
        match self {
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.to_string(),
        }
    }
}

/// Tabular rows for the CSV plus the kind-specific summary for the report.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub columns: &'static [&'static str],
    pub rows: Vec<Vec<Cell>>,
    pub results: Value,
}

/// CSV columns of every experiment kind.
pub fn columns(kind: &str) -> &'static [&'static str] {
    match kind {
        "quantum" => &[
            "energy",
            "transmission",
            "tau_g",
            "tau_d",
            "tau_i",
            "front_time",
            "apparent_speed",
        ],
        "stack" => &[
            "wavelength",
            "transmittance",
            "reflectance",
            "phase",
            "tau_g",
            "u_per_pin",
            "free_space_u_per_pin",
        ],
        "grating" => &[
            "wavelength",
            "detuning",
            "transmittance",
            "reflectance",
            "tau_g",
            "u_per_pin",
        ],
        "hartman" => &["length", "tau_g", "u_per_pin", "apparent_speed"],
        "pulse" => &[
            "time",
            "input_intensity",
            "output_intensity",
            "output_phase",
        ],
        "front" => &["case", "front_time", "pre_front_fraction", "tau_g", "band"],
        "skc" => &[
            "barrier_delay",
            "vacuum_delay",
            "advance",
            "mirror_shift",
            "apparent_speed",
            "u_barrier",
            "u_free",
            "backward_escape",
        ],
        _ => &[],
    }
}

pub fn run(config: &ExperimentConfig) -> Result<Outcome> {
    let u = config.units;
    let (rows, results) = match &config.experiment {
        Experiment::Quantum(c) => quantum(c, u)?,
        Experiment::Stack(c) => stack(c, u)?,
        Experiment::Grating(c) => grating(c, u)?,
        Experiment::Hartman(c) => hartman(c, u)?,
        Experiment::Pulse(c) => pulse(c, u)?,
        Experiment::Front(c) => front(c, u)?,
        Experiment::Skc(c) => skc(c, u)?,
    };
    Ok(Outcome {
        columns: columns(config.experiment.kind()),
        rows,
        results,
    })
}

type Produced = (Vec<Vec<Cell>>, Value);

fn floats(values: &[f64]) -> Vec<Cell> {
    values.iter().map(|&v| Cell::Float(v)).collect()
}

fn quantum(c: &QuantumConfig, u: Units) -> Result<Produced> {
    let barrier = QuantumBarrier::new(u.energy(c.v0), u.length(c.length))?;
    let rows = c
        .energies
        .values()
        .par_iter()
        .map(|&e| {
            let energy = u.energy(e);
            let rep = delay_report(&barrier, energy)?;
            let state = scatter(&barrier, energy)?;
            Ok(floats(&[
                e,
                state.t.norm_sqr(),
                u.time_out(rep.tau_g),
                u.time_out(rep.tau_d),
                u.time_out(rep.tau_i),
                u.time_out(rep.front_time),
                u.speed_out(rep.apparent_speed.unwrap_or(f64::NAN)),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = json!({ "points": rows.len() });
    Ok((rows, results))
}

fn omega_of(wavelength: f64, u: Units) -> f64 {
    TAU / u.length(wavelength)
}

fn stack(c: &StackRunConfig, u: Units) -> Result<Produced> {
    let s = c.stack.build(u)?;
    let rows = c
        .wavelengths
        .values()
        .par_iter()
        .map(|&w| {
            let omega = omega_of(w, u);
            let (t, r) = s.amplitudes(omega);
            let energy = stored_energy(&s, omega)?;
            Ok(floats(&[
                w,
                t.norm_sqr(),
                r.norm_sqr(),
                t.arg(),
                u.time_out(group_delay(&s, omega)?),
                u.time_out(energy.u_per_pin),
                u.time_out(energy.free_space_u_per_pin),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = json!({
        "layers": s.layers().len(),
        "total_length": s.total_length(),
        "points": rows.len(),
    });
    Ok((rows, results))
}

fn grating(c: &GratingConfig, u: Units) -> Result<Produced> {
    let g = UniformGrating::new(
        c.kappa / u.length(1.0),
        u.length(c.length),
        c.n_bar,
        omega_of(c.bragg_wavelength, u),
    )?;
    let rows = c
        .wavelengths
        .values()
        .par_iter()
        .map(|&w| {
            let omega = omega_of(w, u);
            let (t, r) = g.amplitudes(omega)?;
            Ok(floats(&[
                w,
                g.detuning(omega)? / u.length(1.0),
                t.norm_sqr(),
                r.norm_sqr(),
                u.time_out(grating_group_delay(&g, omega)?),
                u.time_out(g.stored_energy(omega)?),
            ]))
        })
        .collect::<Result<Vec<_>>>()?;
    let results = json!({
        "kappa_length": g.kappa() * g.length(),
        "opaque_limit_tau_g": u.time_out(g.n_bar() / g.kappa()),
        "points": rows.len(),
    });
    Ok((rows, results))
}

fn hartman(c: &HartmanConfig, u: Units) -> Result<Produced> {
    let family = match c.family {
        FamilyConfig::Quantum { v0, energy } => BarrierFamily::Quantum {
            v0: u.energy(v0),
            energy: u.energy(energy),
        },
        FamilyConfig::Grating {
            kappa,
            n_bar,
            bragg_wavelength,
            wavelength,
        } => BarrierFamily::Grating {
            kappa: kappa / u.length(1.0),
            n_bar,
            omega_b: omega_of(bragg_wavelength, u),
            omega: omega_of(wavelength.unwrap_or(bragg_wavelength), u),
        },
    };
    let configured = c.lengths.values();
    let lengths: Vec<f64> = configured.iter().map(|&l| u.length(l)).collect();
    let sweep = hartman_sweep(&family, &lengths)?;
    let rows = (0..lengths.len())
        .map(|k| {
            floats(&[
                configured[k],
                u.time_out(sweep.tau_g[k]),
                u.time_out(sweep.u_per_pin[k]),
                u.speed_out(sweep.apparent_speed[k]),
            ])
        })
        .collect();
    let ratio_min = sweep
        .proportionality
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let ratio_max = sweep
        .proportionality
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let results = json!({
        "decade_change": sweep.decade_change,
        "tau_g_over_stored": { "min": ratio_min, "max": ratio_max },
        "stored_quantity": match c.family {
            FamilyConfig::Quantum { .. } => "dwell time",
            FamilyConfig::Grating { .. } => "stored energy per unit input power",
        },
        "points": lengths.len(),
    });
    Ok((rows, results))
}

/// Stopband around the configured (or design) wavelength.
fn band_at(
    stack: &StackConfig,
    wavelength: Option<f64>,
    s: &LayeredStack,
    u: Units,
) -> Result<Stopband> {
    let w =
        ExperimentConfig::carrier_wavelength(stack, wavelength).expect("validated before the run");
    stopband(s, omega_of(w, u))
}

fn band_json(band: &Stopband, u: Units) -> Value {
    json!({
        "midgap_wavelength": TAU / band.center(),
        "lower_edge_frequency": u.rate_out(band.lower),
        "upper_edge_frequency": u.rate_out(band.upper),
        "width": u.rate_out(band.width()),
    })
}

fn pulse(c: &PulseConfig, u: Units) -> Result<Produced> {
    let s = c.stack.build(u)?;
    let band = band_at(&c.stack, c.wavelength, &s, u)?;
    let p = PulseEnvelope::gaussian(
        band.center(),
        c.bandwidth_fraction * band.width(),
        c.samples,
    )?;
    let out = propagate_spectral(&stack_response(&s, &p.spectral_grid()), &p)?;
    let rows = p
        .times()
        .iter()
        .zip(p.amplitudes())
        .zip(&out.a_out)
        .map(|((&t, a), b)| floats(&[u.time_out(t), a.norm_sqr(), b.norm_sqr(), b.arg()]))
        .collect();
    let results = json!({
        "stopband": band_json(&band, u),
        "peak_delay": u.time_out(out.peak_delay),
        "tau_g": u.time_out(out.tau_g),
        "width_ratio": out.width_ratio,
        "quasistatic_deviation": out.quasistatic_deviation,
        "carrier_transmittance": out.carrier_transmission.norm_sqr(),
        "input_energy": u.time_out(out.input_energy),
        "transmitted_energy": u.time_out(out.transmitted_energy),
        "reflected_energy": u.time_out(out.reflected_energy),
        "energy_defect": out.energy_defect(),
        "vacuum_transit": u.time_out(s.total_length()),
    });
    Ok((rows, results))
}

fn front(c: &FrontConfig, u: Units) -> Result<Produced> {
    let s = c.stack.build(u)?;
    let band = band_at(&c.stack, c.wavelength, &s, u)?;
    let ramp = FrontRamp {
        n_cycles: c.ramp.n_cycles,
        plateau_cycles: c.ramp.plateau_cycles,
        band_factor: c.ramp.band_factor,
    };
    let barrier = front_causality(&s, band.center(), &ramp, band.width())?;
    let control = front_causality(
        &LayeredStack::vacuum(s.total_length())?,
        band.center(),
        &ramp,
        band.width(),
    )?;
    let row = |case: &'static str, r: &tunnelab::timedomain::FrontTestResult| {
        vec![
            Cell::Text(case),
            Cell::Float(u.time_out(r.front_time)),
            Cell::Float(r.pre_front_fraction),
            Cell::Float(u.time_out(r.tau_g)),
            Cell::Float(u.rate_out(r.band)),
        ]
    };
    let rows = vec![row("stack", &barrier), row("vacuum_control", &control)];
    let results = json!({
        "stopband": band_json(&band, u),
        "front_time": u.time_out(barrier.front_time),
        "pre_front_fraction": barrier.pre_front_fraction,
        "control_floor": control.pre_front_fraction,
        "tau_g": u.time_out(barrier.tau_g),
        "peak_precedes_front": barrier.tau_g < barrier.front_time,
    });
    Ok((rows, results))
}

/// The report with its times in output units.
fn in_units(rep: &SkcReport, u: Units) -> SkcReport {
    SkcReport {
        barrier_delay: u.time_out(rep.barrier_delay),
        vacuum_delay: u.time_out(rep.vacuum_delay),
        advance: u.time_out(rep.advance),
        u_barrier: u.time_out(rep.u_barrier),
        u_free: u.time_out(rep.u_free),
        ..*rep
    }
}

fn skc(c: &SkcConfig, u: Units) -> Result<Produced> {
    let s = c.stack.build(u)?;
    let band = band_at(&c.stack, c.wavelength, &s, u)?;
    let rep = skc_report(&s, band.center())?;
    let rows = vec![floats(&[
        u.time_out(rep.barrier_delay),
        u.time_out(rep.vacuum_delay),
        u.time_out(rep.advance),
        rep.mirror_shift,
        rep.apparent_speed,
        u.time_out(rep.u_barrier),
        u.time_out(rep.u_free),
        rep.backward_escape,
    ])];
    let results = json!({
        "stopband": band_json(&band, u),
        "barrier_delay": u.time_out(rep.barrier_delay),
        "vacuum_delay": u.time_out(rep.vacuum_delay),
        "advance": u.time_out(rep.advance),
        "mirror_shift": rep.mirror_shift,
        "apparent_speed": rep.apparent_speed,
        "stored_energy_deficit": u.time_out(rep.energy_deficit()),
        "backward_escape": rep.backward_escape,
        "interpretation": in_units(&rep, u).interpretation(),
    });
    Ok((rows, results))
}
