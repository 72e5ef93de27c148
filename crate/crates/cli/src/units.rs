use serde::{Deserialize, Serialize};

/// `1 µm / c` in femtoseconds.
pub const FS_PER_MICRON: f64 = 3.335_640_951_981_52;
/// `ħc` in eV·nm.
const HBAR_C_EV_NM: f64 = 197.326_980_4;
/// Electron rest energy in eV.
const ELECTRON_REST_EV: f64 = 510_998.95;
/// `ħ` in eV·fs.
const HBAR_EV_FS: f64 = 0.658_211_956_9;

/// Unit system of a config file and of everything written for it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Units {
    /// `ħ = m = 1` for particles, `c = 1` for light.
    #[default]
    Natural,
    /// Lengths in µm, times in fs; speeds in units of `c`.
    Optical,
    /// Lengths in nm, energies in eV, times in fs, electron mass; speeds in nm/fs.
    Electronic,
}

impl Units {
    /// Energy unit `ħ²/(m_e·nm²)` in eV.
    fn electronic_energy() -> f64 {
        HBAR_C_EV_NM * HBAR_C_EV_NM / ELECTRON_REST_EV
    }

    /// Configured length to natural length; the natural length unit is the configured one.
    pub fn length(&self, value: f64) -> f64 {
        value
    }

    /// Configured energy to natural energy.
    pub fn energy(&self, value: f64) -> f64 {
        match self {
            Units::Electronic => value / Self::electronic_energy(),
            _ => value,
        }
    }

    /// Natural energy to configured energy.
    pub fn energy_out(&self, value: f64) -> f64 {
        match self {
            Units::Electronic => value * Self::electronic_energy(),
            _ => value,
        }
    }

    /// Natural time to configured time.
    pub fn time_out(&self, value: f64) -> f64 {
        match self {
            Units::Natural => value,
            Units::Optical => value * FS_PER_MICRON,
            Units::Electronic => value * HBAR_EV_FS / Self::electronic_energy(),
        }
    }

    /// Natural frequency to configured inverse time.
    pub fn rate_out(&self, value: f64) -> f64 {
        value / self.time_out(1.0)
    }

    /// Natural speed to configured speed.
    pub fn speed_out(&self, value: f64) -> f64 {
        match self {
            Units::Electronic => value / self.time_out(1.0),
            _ => value,
        }
    }

    pub fn labels(&self) -> serde_json::Value {
        let (length, time, energy, speed) = match self {
            Units::Natural => ("natural", "natural", "natural", "natural"),
            Units::Optical => ("um", "fs", "n/a", "c"),
            Units::Electronic => ("nm", "fs", "eV", "nm/fs"),
        };
        serde_json::json!({ "length": length, "time": time, "energy": energy, "speed": speed })
    }
}
