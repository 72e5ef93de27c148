//! Command-line front end: JSON experiment configs in, CSV tables and a JSON
//! run report out.

pub mod config;
pub mod experiments;
pub mod output;
pub mod units;

use std::path::{Path, PathBuf};
use std::time::Instant;

use config::{ConfigError, ExperimentConfig, Format};
use output::{Failure, RunReport, Status};

pub const TOOL: &str = "tunnelab";

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("invalid parameter: {0}")]
    Parameter(tunnelab::Error),
    #[error("numerical failure in {module}: {message}")]
    Numerical { module: String, message: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RunError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Parameter(_) => 2,
            RunError::Numerical { .. } => 3,
            RunError::Io(_) | RunError::Pool(_) => 1,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub output_dir: PathBuf,
    /// Overrides the config's `output.format`.
    pub format: Option<Format>,
    /// Worker threads; `None` uses rayon's default.
    pub threads: Option<usize>,
}

/// Paths written by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub report: RunReport,
}

fn report_for(config: &ExperimentConfig, status: Status) -> RunReport {
    RunReport {
        tool: TOOL.to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        kind: config.experiment.kind().to_string(),
        status,
        config: config.raw.clone(),
        units: config.units.labels(),
        csv_columns: experiments::columns(config.experiment.kind())
            .iter()
            .map(|c| c.to_string())
            .collect(),
        results: serde_json::Value::Null,
        error: None,
        duration_seconds: 0.0,
        seed: 0,
    }
}

/// Loads, runs and writes one experiment.
pub fn run(config_path: &Path, options: &RunOptions) -> Result<RunOutput, RunError> {
    let config = ExperimentConfig::from_path(config_path)?;
    run_config(&config, options)
}

pub fn run_config(config: &ExperimentConfig, options: &RunOptions) -> Result<RunOutput, RunError> {
    let format = options
        .format
        .or(config.output.format)
        .unwrap_or(Format::Both);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = options.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build()?;

    let start = Instant::now();
    let outcome = pool.install(|| experiments::run(config));
    let elapsed = start.elapsed().as_secs_f64();

    let csv_path = options.output_dir.join(format!("{}.csv", config.stem()));
    let json_path = options.output_dir.join(format!("{}.json", config.stem()));
    let mut report = report_for(config, Status::Ok);
    report.duration_seconds = elapsed;

    match outcome {
        Ok(outcome) => {
            std::fs::create_dir_all(&options.output_dir)?;
            report.results = outcome.results;
            let csv = if format.csv() {
                output::write_csv(&csv_path, outcome.columns, &outcome.rows)?;
                Some(csv_path)
            } else {
                None
            };
            let json = if format.json() {
                report.write(&json_path)?;
                Some(json_path)
            } else {
                None
            };
            Ok(RunOutput { csv, json, report })
        }
        Err(e @ tunnelab::Error::InvalidParameter(_)) => Err(RunError::Parameter(e)),
        Err(e) => {
            // A stale table from an earlier run must not pass for this one.
            if csv_path.exists() {
                std::fs::remove_file(&csv_path)?;
            }
            std::fs::create_dir_all(&options.output_dir)?;
            report.status = Status::NumericalFailure;
            report.error = Some(Failure {
                module: e.module().to_string(),
                message: e.to_string(),
            });
            report.write(&json_path)?;
            Err(RunError::Numerical {
                module: e.module().to_string(),
                message: e.to_string(),
            })
        }
    }
}

/// Text of `tunnelab list`.
pub fn list_experiments() -> String {
    let mut out = String::new();
    for (kind, about, keys) in EXPERIMENTS {
        out.push_str(&format!(
            "{kind}\n  {about}\n  keys: {keys}\n  columns: {}\n",
            experiments::columns(kind).join(",")
        ));
    }
    out.push_str(&format!("stack keys: {STACK_KEYS}\n"));
    out
}

const STACK_KEYS: &str = "stack {type: quarter_wave (n_high, n_low, layers, design_wavelength, [n_ambient]) | layers (layers [{n, thickness}], n_in, n_out)}";

const EXPERIMENTS: [(&str, &str, &str); 7] = [
    (
        "quantum",
        "Rectangular-barrier tunneling: transmission, group delay, dwell time and front arrival versus energy.",
        "v0, length, energies {start, stop, count}",
    ),
    (
        "stack",
        "Layered dielectric stack: transmission, group delay and stored energy versus wavelength.",
        "stack, wavelengths {start, stop, count}",
    ),
    (
        "grating",
        "Uniform Bragg grating: coupled-mode transmission, group delay and stored energy versus wavelength.",
        "kappa, length, n_bar, bragg_wavelength, wavelengths {start, stop, count}",
    ),
    (
        "hartman",
        "Delay saturation with barrier length (quantum dwell time or grating stored energy).",
        "family {type: quantum (v0, energy) | grating (kappa, n_bar, bragg_wavelength, [wavelength])}, lengths {start, stop, count}",
    ),
    (
        "pulse",
        "Gaussian pulse through a stack: reshaped output and peak delay against the group delay.",
        "stack, bandwidth_fraction, [samples], [wavelength]",
    ),
    (
        "front",
        "Signal-front causality: energy arriving before the vacuum light-cone, with a vacuum control.",
        "stack, ramp {n_cycles, plateau_cycles, band_factor}, [wavelength]",
    ),
    (
        "skc",
        "Photon tunneling-time comparison: barrier versus equal-length vacuum delay and stored energy.",
        "stack, [wavelength]",
    ),
];
