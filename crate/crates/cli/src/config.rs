use std::f64::consts::{FRAC_PI_2, TAU};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tunnelab::photonic::{Layer, LayeredStack};

use crate::units::Units;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn positive(name: &str, value: f64) -> Result<(), ConfigError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be positive, got {value}")))
    }
}

/// Output file format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Both,
}

impl Format {
    pub fn csv(&self) -> bool {
        matches!(self, Format::Csv | Format::Both)
    }

    pub fn json(&self) -> bool {
        matches!(self, Format::Json | Format::Both)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// File stem for `<stem>.csv` and `<stem>.json`; defaults to the experiment kind.
    pub stem: Option<String>,
    pub format: Option<Format>,
}

/// `count` evenly spaced values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl Sweep {
    fn validate(&self, name: &str) -> Result<(), ConfigError> {
        if self.count == 0 {
            return Err(invalid(format!("{name}.count must be at least 1")));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(invalid(format!("{name} bounds must be finite")));
        }
        if self.count > 1 && self.stop <= self.start {
            return Err(invalid(format!("{name}.stop must exceed {name}.start")));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|j| self.start + j as f64 * step)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayerConfig {
    pub n: f64,
    pub thickness: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum StackConfig {
    /// High-index-first quarter-wave stack at `design_wavelength`.
    QuarterWave {
        n_high: f64,
        n_low: f64,
        layers: usize,
        design_wavelength: f64,
        /// Index of the medium on both sides.
        #[serde(default = "one")]
        n_ambient: f64,
    },
    Layers {
        layers: Vec<LayerConfig>,
        #[serde(default = "one")]
        n_in: f64,
        #[serde(default = "one")]
        n_out: f64,
    },
}

impl StackConfig {
    fn validate(&self) -> Result<(), ConfigError> {
        match self {
            StackConfig::QuarterWave {
                n_high,
                n_low,
                layers,
                design_wavelength,
                n_ambient,
            } => {
                positive("stack.n_high", *n_high)?;
                positive("stack.n_low", *n_low)?;
                positive("stack.design_wavelength", *design_wavelength)?;
                positive("stack.n_ambient", *n_ambient)?;
                if *layers == 0 {
                    return Err(invalid("stack.layers must be at least 1"));
                }
            }
            StackConfig::Layers {
                layers,
                n_in,
                n_out,
            } => {
                for l in layers {
                    positive("layer n", l.n)?;
                    positive("layer thickness", l.thickness)?;
                }
                positive("stack.n_in", *n_in)?;
                positive("stack.n_out", *n_out)?;
            }
        }
        Ok(())
    }

    pub fn build(&self, units: Units) -> Result<LayeredStack, tunnelab::Error> {
        match *self {
            StackConfig::QuarterWave {
                n_high,
                n_low,
                layers,
                design_wavelength,
                n_ambient,
            } => {
                let omega0 = TAU / units.length(design_wavelength);
                let layers = (0..layers)
                    .map(|j| {
                        let n = if j % 2 == 0 { n_high } else { n_low };
                        Layer {
                            n,
                            d: FRAC_PI_2 / (n * omega0),
                        }
                    })
                    .collect();
                LayeredStack::new(layers, n_ambient, n_ambient)
            }
            StackConfig::Layers {
                ref layers,
                n_in,
                n_out,
            } => LayeredStack::new(
                layers
                    .iter()
                    .map(|l| Layer {
                        n: l.n,
                        d: units.length(l.thickness),
                    })
                    .collect(),
                n_in,
                n_out,
            ),
        }
    }

    /// Vacuum wavelength the stack is designed around, if it has one.
    pub fn design_wavelength(&self) -> Option<f64> {
        match self {
            StackConfig::QuarterWave {
                design_wavelength, ..
            } => Some(*design_wavelength),
            StackConfig::Layers { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantumConfig {
    pub v0: f64,
    pub length: f64,
    pub energies: Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StackRunConfig {
    pub stack: StackConfig,
    pub wavelengths: Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GratingConfig {
    pub kappa: f64,
    pub length: f64,
    pub n_bar: f64,
    pub bragg_wavelength: f64,
    pub wavelengths: Sweep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FamilyConfig {
    Quantum {
        v0: f64,
        energy: f64,
    },
    Grating {
        kappa: f64,
        n_bar: f64,
        bragg_wavelength: f64,
        /// Probe wavelength; the Bragg wavelength when absent.
        wavelength: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HartmanConfig {
    pub family: FamilyConfig,
    pub lengths: Sweep,
}

fn default_samples() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseConfig {
    pub stack: StackConfig,
    /// Power-spectrum FWHM as a fraction of the stopband width.
    pub bandwidth_fraction: f64,
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Any wavelength inside the stopband; the design wavelength when absent.
    pub wavelength: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RampConfig {
    pub n_cycles: f64,
    pub plateau_cycles: f64,
    pub band_factor: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrontConfig {
    pub stack: StackConfig,
    pub ramp: RampConfig,
    pub wavelength: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SkcConfig {
    pub stack: StackConfig,
    pub wavelength: Option<f64>,
}

/// Experiment-specific parameters, selected by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Experiment {
    Quantum(QuantumConfig),
    Stack(StackRunConfig),
    Grating(GratingConfig),
    Hartman(HartmanConfig),
    Pulse(PulseConfig),
    Front(FrontConfig),
    Skc(SkcConfig),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Quantum(_) => "quantum",
            Experiment::Stack(_) => "stack",
            Experiment::Grating(_) => "grating",
            Experiment::Hartman(_) => "hartman",
            Experiment::Pulse(_) => "pulse",
            Experiment::Front(_) => "front",
            Experiment::Skc(_) => "skc",
        }
    }

    fn is_quantum(&self) -> bool {
        matches!(
            self,
            Experiment::Quantum(_)
                | Experiment::Hartman(HartmanConfig {
                    family: FamilyConfig::Quantum { .. },
                    ..
                })
        )
    }
}

/// A whole config file: the experiment plus unit system and output settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub units: Units,
    pub output: OutputConfig,
    /// The file as parsed, echoed into the run report.
    pub raw: serde_json::Value,
}

const COMMON_KEYS: [&str; 2] = ["units", "output"];

impl ExperimentConfig {
    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let raw: serde_json::Value = serde_json::from_str(text)?;
        let object = raw
            .as_object()
            .ok_or_else(|| invalid("config must be a JSON object"))?;
        let units: Units = match object.get("units") {
            Some(v) => serde_json::from_value(v.clone())?,
            None => Units::default(),
        };
        let output: OutputConfig = match object.get("output") {
            Some(v) => serde_json::from_value(v.clone())?,
            None => OutputConfig {
                stem: None,
                format: None,
            },
        };
        let mut rest = object.clone();
        for key in COMMON_KEYS {
            rest.remove(key);
        }
        let experiment: Experiment = serde_json::from_value(serde_json::Value::Object(rest))?;
        let config = Self {
            experiment,
            units,
            output,
            raw,
        };
        config.validate()?;
        Ok(config)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        let quantum = self.experiment.is_quantum();
        match (self.units, quantum) {
            (Units::Optical, true) => {
                return Err(invalid("optical units apply to photonic experiments only"))
            }
            (Units::Electronic, false) => {
                return Err(invalid(
                    "electronic units apply to quantum experiments only",
                ))
            }
            _ => {}
        }
        if let Some(stem) = &self.output.stem {
            if stem.is_empty() || stem.contains(['/', '\\']) {
                return Err(invalid("output.stem must be a plain file name"));
            }
        }
        match &self.experiment {
            Experiment::Quantum(c) => {
                positive("v0", c.v0)?;
                positive("length", c.length)?;
                c.energies.validate("energies")?;
                positive("energies.start", c.energies.start)?;
            }
            Experiment::Stack(c) => {
                c.stack.validate()?;
                c.wavelengths.validate("wavelengths")?;
                positive("wavelengths.start", c.wavelengths.start)?;
            }
            Experiment::Grating(c) => {
                if !(c.kappa >= 0.0 && c.kappa.is_finite()) {
                    return Err(invalid("kappa must be nonnegative"));
                }
                positive("length", c.length)?;
                positive("n_bar", c.n_bar)?;
                positive("bragg_wavelength", c.bragg_wavelength)?;
                c.wavelengths.validate("wavelengths")?;
                positive("wavelengths.start", c.wavelengths.start)?;
            }
            Experiment::Hartman(c) => {
                match c.family {
                    FamilyConfig::Quantum { v0, energy } => {
                        positive("family.v0", v0)?;
                        positive("family.energy", energy)?;
                    }
                    FamilyConfig::Grating {
                        kappa,
                        n_bar,
                        bragg_wavelength,
                        wavelength,
                    } => {
                        positive("family.kappa", kappa)?;
                        positive("family.n_bar", n_bar)?;
                        positive("family.bragg_wavelength", bragg_wavelength)?;
                        if let Some(w) = wavelength {
                            positive("family.wavelength", w)?;
                        }
                    }
                }
                c.lengths.validate("lengths")?;
                positive("lengths.start", c.lengths.start)?;
            }
            Experiment::Pulse(c) => {
                c.stack.validate()?;
                positive("bandwidth_fraction", c.bandwidth_fraction)?;
                if c.samples < 64 {
                    return Err(invalid("samples must be at least 64"));
                }
                Self::carrier_wavelength(&c.stack, c.wavelength)?;
            }
            Experiment::Front(c) => {
                c.stack.validate()?;
                positive("ramp.n_cycles", c.ramp.n_cycles)?;
                positive("ramp.band_factor", c.ramp.band_factor)?;
                if c.ramp.plateau_cycles.is_nan() || c.ramp.plateau_cycles < 0.0 {
                    return Err(invalid("ramp.plateau_cycles must be nonnegative"));
                }
                Self::carrier_wavelength(&c.stack, c.wavelength)?;
            }
            Experiment::Skc(c) => {
                c.stack.validate()?;
                Self::carrier_wavelength(&c.stack, c.wavelength)?;
            }
        }
        Ok(())
    }

    /// Explicit wavelength, else the stack's design wavelength.
    pub fn carrier_wavelength(
        stack: &StackConfig,
        wavelength: Option<f64>,
    ) -> Result<f64, ConfigError> {
        let w = wavelength
            .or(stack.design_wavelength())
            .ok_or_else(|| invalid("wavelength is required for an explicit layer list"))?;
        positive("wavelength", w)?;
        Ok(w)
    }

    pub fn stem(&self) -> &str {
        self.output
            .stem
            .as_deref()
            .unwrap_or(self.experiment.kind())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SKC: &str = r#"{
        "kind": "skc",
        "units": "optical",
        "stack": {"type": "quarter_wave", "n_high": 2.22, "n_low": 1.41, "layers": 11,
                  "design_wavelength": 0.702, "n_ambient": 1.45}
    }"#;

    #[test]
    fn parses_and_echoes() {
        let c = ExperimentConfig::parse(SKC).unwrap();
        assert_eq!(c.experiment.kind(), "skc");
        assert_eq!(c.units, Units::Optical);
        assert_eq!(c.stem(), "skc");
        assert_eq!(
            c.raw,
            serde_json::from_str::<serde_json::Value>(SKC).unwrap()
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let top = SKC.replace("\"units\"", "\"colour\": 1, \"units\"");
        assert!(ExperimentConfig::parse(&top).is_err());
        let nested = SKC.replace("\"layers\": 11", "\"layers\": 11, \"extra\": 2");
        assert!(ExperimentConfig::parse(&nested).is_err());
    }

    #[test]
    fn missing_and_invalid_values() {
        let missing =
            r#"{"kind": "quantum", "v0": 2.0, "energies": {"start": 1, "stop": 1, "count": 1}}"#;
        assert!(matches!(
            ExperimentConfig::parse(missing),
            Err(ConfigError::Parse(_))
        ));
        let negative = r#"{"kind": "quantum", "v0": 2.0, "length": -1.0,
                           "energies": {"start": 1, "stop": 1, "count": 1}}"#;
        assert!(matches!(
            ExperimentConfig::parse(negative),
            Err(ConfigError::Invalid(_))
        ));
        let units = SKC.replace("optical", "electronic");
        assert!(ExperimentConfig::parse(&units).is_err());
        assert!(ExperimentConfig::parse("[1, 2]").is_err());
        assert!(ExperimentConfig::parse(r#"{"kind": "teleport"}"#).is_err());
    }

    #[test]
    fn sweep_values() {
        let s = Sweep {
            start: 1.0,
            stop: 3.0,
            count: 5,
        };
        assert_eq!(s.values(), vec![1.0, 1.5, 2.0, 2.5, 3.0]);
    }
}
