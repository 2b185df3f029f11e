//! Scenario parameter schema (TOML or JSON).

use std::collections::BTreeMap;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteSlit {
    /// Half width of each slit along `x²`.
    pub half_width: f64,
    /// Trapezoid samples per slit.
    pub samples: usize,
}

impl Default for FiniteSlit {
    fn default() -> Self {
        Self { half_width: 0.25, samples: 9 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DoubleSlitConfig {
    pub mass: f64,
    pub hbar: f64,
    pub p_o: f64,
    pub slits: Vec<[f64; 3]>,
    pub screen_x: f64,
    pub screen_half_width: f64,
    pub screen_nodes: usize,
    pub finite_slits: Option<FiniteSlit>,
}

impl Default for DoubleSlitConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            hbar: 1.0,
            p_o: 2.0,
            slits: vec![[0.0, 5.0, 0.0], [0.0, -5.0, 0.0]],
            screen_x: 10.0,
            screen_half_width: 30.0,
            screen_nodes: 6001,
            finite_slits: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AharonovBohmConfig {
    #[serde(flatten)]
    pub slit: DoubleSlitConfig,
    pub charge: f64,
    pub flux: f64,
    /// Solenoid axis position `(x¹, x²)`, parallel to `x³`.
    pub solenoid: [f64; 2],
}

impl Default for AharonovBohmConfig {
    fn default() -> Self {
        Self { slit: DoubleSlitConfig::default(), charge: 1.0, flux: 1.0, solenoid: [2.0, 0.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BoxConfig {
    pub mass: f64,
    pub hbar: f64,
    pub length: f64,
    pub x_o: f64,
    pub k_max: usize,
    pub grid_nodes: usize,
}

impl Default for BoxConfig {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, length: 1.0, x_o: 0.2, k_max: 20, grid_nodes: 401 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    pub x0: f64,
    pub sigma: f64,
    pub half_width: f64,
    pub nodes: usize,
    pub dt: f64,
    pub duration: f64,
}

impl Default for PacketConfig {
    fn default() -> Self {
        Self { x0: -60.0, sigma: 10.0, half_width: 200.0, nodes: 4001, dt: 0.02, duration: 60.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TunnelingConfig {
    pub mass: f64,
    pub hbar: f64,
    pub p_o: f64,
    pub v_inf: f64,
    pub rho_o: f64,
    pub packet: PacketConfig,
}

impl Default for TunnelingConfig {
    fn default() -> Self {
        // E = 2 V∞
        Self { mass: 1.0, hbar: 1.0, p_o: 2.0, v_inf: 1.0, rho_o: 1.0, packet: PacketConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HarmonicConfig {
    pub mass: f64,
    pub hbar: f64,
    pub omega: f64,
    pub dim: usize,
    pub x_o: Vec<f64>,
    pub k_max: usize,
    pub caustic_eps: f64,
}

impl Default for HarmonicConfig {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, omega: 1.0, dim: 1, x_o: vec![0.5], k_max: 60, caustic_eps: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitalTerm {
    pub k: [usize; 4],
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CoulombConfig {
    pub mass: f64,
    pub hbar: f64,
    pub g: f64,
    pub k_max: usize,
    /// Initial quaternion of the Kepler orbit.
    pub q_o: [f64; 4],
    /// Wave coefficients `c_{k₁..k₄}`; empty means the 1S orbital.
    pub orbital: Vec<OrbitalTerm>,
}

impl Default for CoulombConfig {
    fn default() -> Self {
        Self { mass: 1.0, hbar: 1.0, g: 1.0, k_max: 10, q_o: [0.5, 0.3, 0.0, 0.0], orbital: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpinConfig {
    /// Coplanar filter angles in degrees for `n₁..n₄`.
    pub angles_deg: Vec<f64>,
    pub samples: usize,
    pub seed: u64,
    pub shards: usize,
}

impl Default for SpinConfig {
    fn default() -> Self {
        Self { angles_deg: vec![0.0, 45.0, 90.0, 135.0], samples: 1_000_000, seed: 20_240_601, shards: 16 }
    }
}

/// A checked-in run file: scenario name, seed, parameters and tolerances.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub scenario: String,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "empty_table")]
    pub params: toml::Value,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
}

fn empty_table() -> toml::Value {
    toml::Value::Table(Default::default())
}

pub const SCENARIOS: [&str; 7] = ["two-slit", "aharonov-bohm", "box", "tunneling", "harmonic", "coulomb", "epr"];

impl ScenarioFile {
    pub fn parse(text: &str, json: bool) -> Result<Self> {
        let file: ScenarioFile = if json {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        if !SCENARIOS.contains(&file.scenario.as_str()) {
            return Err(Error::Config(format!("unknown scenario `{}`", file.scenario)));
        }
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path)?;
        let json = path.extension().is_some_and(|e| e == "json");
        Ok((Self::parse(&text, json)?, text))
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        self.params.clone().try_into().map_err(|e: toml::de::Error| Error::Config(e.to_string()))
    }

    /// Tolerance override or the pinned default.
    pub fn tolerance(&self, key: &str, default: f64) -> f64 {
        self.tolerances.get(key).copied().unwrap_or(default)
    }
}

/// Default parameters of every scenario, as documented schema.
pub fn schema() -> serde_json::Value {
    serde_json::json!({
        "two-slit": DoubleSlitConfig::default(),
        "aharonov-bohm": AharonovBohmConfig::default(),
        "box": BoxConfig::default(),
        "tunneling": TunnelingConfig::default(),
        "harmonic": HarmonicConfig::default(),
        "coulomb": CoulombConfig::default(),
        "epr": SpinConfig::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_params_fill_defaults() {
        let f = ScenarioFile::parse("scenario = \"box\"\n[params]\nlength = 2.0\n[tolerances]\nspectrum = 1e-10\n", false).unwrap();
        let cfg: BoxConfig = f.params().unwrap();
        assert_eq!(cfg.length, 2.0);
        assert_eq!(cfg.k_max, 20);
        assert_eq!(f.tolerance("spectrum", 1.0), 1e-10);
    }

    #[test]
    fn unknown_fields_are_rejected() {
        let f = ScenarioFile::parse("scenario = \"box\"\n[params]\nwidth = 2.0\n", false).unwrap();
        assert!(matches!(f.params::<BoxConfig>(), Err(Error::Config(_))));
        assert!(ScenarioFile::parse("scenario = \"nope\"", false).is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = serde_json::json!({"scenario": "harmonic", "params": {"omega": 2.0}}).to_string();
        let f = ScenarioFile::parse(&text, true).unwrap();
        assert_eq!(f.params::<HarmonicConfig>().unwrap().omega, 2.0);
    }
}
