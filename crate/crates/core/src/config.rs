//! Run configuration read from TOML, with monitor thresholds defaulting to
//! the frozen values in `defaults.toml`.

use crate::boundary::StreamlineSpec;
use crate::gas::GasParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

const DEFAULTS: &str = include_str!("../defaults.toml");

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Thresholds of every check and monitor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thresholds {
    pub w_tilde_max: f64,
    pub containment_slack: f64,
    pub c2_identity_max: f64,
    pub kappa_prime_fd_max: f64,
    pub bernoulli_roundtrip_max: f64,
    pub eigen_quadratic_max: f64,
    pub eigen_tangent_max: f64,
    pub transcription_max: f64,
    pub boundary_identity_max: f64,
    pub compat_order_min: f64,
    pub closure_c_spread: f64,
    pub holder_alpha_min: f64,
    pub holder_r2_min: f64,
    pub sup_w_spread: f64,
    pub sonic_mu_min: f64,
    pub sonic_mu_r2_min: f64,
    pub bernoulli_max: f64,
    pub injectivity_tol: f64,
    pub no_landing_max: f64,
    pub residual_order_min: f64,
    pub residual_max: f64,
    pub crosscheck_field_max: f64,
    pub crosscheck_hausdorff_max: f64,
}

#[derive(Deserialize)]
struct DefaultsFile {
    version: u32,
    monitors: toml::Table,
}

fn defaults_file() -> DefaultsFile {
    toml::from_str(DEFAULTS).expect("bundled defaults.toml is valid")
}

/// Version of the bundled threshold file.
pub fn defaults_version() -> u32 {
    defaults_file().version
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::with_overrides(&toml::Table::new()).expect("bundled defaults.toml is complete")
    }
}

impl Thresholds {
    /// Defaults with the given keys replaced. Unknown keys are rejected.
    pub fn with_overrides(overrides: &toml::Table) -> Result<Self, ConfigError> {
        let mut table = defaults_file().monitors;
        for (k, v) in overrides {
            if !table.contains_key(k) {
                return Err(ConfigError::Invalid(format!("unknown monitor threshold `{k}`")));
            }
            table.insert(k.clone(), v.clone());
        }
        toml::Value::Table(table).try_into().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamlineConfig {
    pub xi1: f64,
    pub xi2: f64,
    pub eta_m: f64,
    pub s1: f64,
    pub s2: f64,
    pub r: f64,
    /// Sonic specific volume; 1.1·τ₁ when absent.
    pub tau_m: Option<f64>,
}

impl StreamlineConfig {
    pub fn spec(&self, tau_m: f64) -> StreamlineSpec {
        StreamlineSpec { xi1: self.xi1, xi2: self.xi2, eta_m: self.eta_m, s1: self.s1, s2: self.s2, r: self.r, tau_m }
    }
}

fn default_z_per_t() -> f64 {
    5.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n_boundary: usize,
    pub dt: f64,
    /// Fixed Δz; derived from the domain when absent.
    pub dz: Option<f64>,
    /// Lattice cells per Δt at the base of Ω for the derived Δz.
    #[serde(default = "default_z_per_t")]
    pub z_per_t: f64,
}

fn default_tau_rtol() -> f64 {
    1e-12
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceConfig {
    #[serde(default = "default_tau_rtol")]
    pub tau_rtol: f64,
    #[serde(default)]
    pub monitors: toml::Table,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self { tau_rtol: default_tau_rtol(), monitors: toml::Table::new() }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default)]
    pub dump_boundary: bool,
    #[serde(default)]
    pub dump_field: bool,
    #[serde(default)]
    pub dump_patch: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), dump_boundary: false, dump_field: false, dump_patch: false }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub gas: GasParams,
    pub streamline: StreamlineConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub tolerances: ToleranceConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    #[serde(default)]
    pub seed: u64,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; a relative output directory is resolved against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.outputs.directory.is_relative() {
            if let Some(dir) = path.parent() {
                cfg.outputs.directory = dir.join(&cfg.outputs.directory);
            }
        }
        Ok(cfg)
    }

    pub fn thresholds(&self) -> Result<Thresholds, ConfigError> {
        Thresholds::with_overrides(&self.tolerances.monitors)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        self.gas.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if let Some(tau_m) = self.streamline.tau_m {
            if !(tau_m > self.gas.b) {
                return bad(format!("tau_m = {tau_m} must exceed the covolume b = {}", self.gas.b));
            }
        }
        self.streamline.spec(self.streamline.tau_m.unwrap_or(1.0)).validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let g = &self.grid;
        if g.n_boundary < 8 {
            return bad(format!("n_boundary = {} is below 8", g.n_boundary));
        }
        if !(g.dt > 0.0 && g.dt.is_finite()) {
            return bad(format!("dt = {} must be positive", g.dt));
        }
        if let Some(dz) = g.dz {
            if !(dz > 0.0 && dz.is_finite()) {
                return bad(format!("dz = {dz} must be positive"));
            }
        }
        if !(g.z_per_t > 0.0 && g.z_per_t.is_finite()) {
            return bad(format!("z_per_t = {} must be positive", g.z_per_t));
        }
        if !(self.tolerances.tau_rtol > 0.0 && self.tolerances.tau_rtol < 1e-6) {
            return bad(format!("tau_rtol = {} out of (0, 1e-6)", self.tolerances.tau_rtol));
        }
        self.thresholds()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [gas]
        K = 1.0
        gamma = 0.5
        a = 0.02
        b = 0.05
        [streamline]
        xi1 = -0.5
        xi2 = 0.0
        eta_m = 0.0
        s1 = -0.8
        s2 = -0.6
        r = 0.9
        [grid]
        n_boundary = 256
        dt = 1e-3
    "#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.grid.z_per_t, 5.0);
        assert_eq!(cfg.tolerances.tau_rtol, 1e-12);
        assert_eq!(cfg.thresholds().unwrap(), Thresholds::default());
        assert_eq!(Thresholds::default().residual_order_min, 0.9);
    }

    #[test]
    fn overrides_replace_single_thresholds() {
        let text = format!("{MINIMAL}\n[tolerances.monitors]\nresidual_max = 1e-2\n");
        let t = RunConfig::from_toml(&text).unwrap().thresholds().unwrap();
        assert_eq!(t.residual_max, 1e-2);
        assert_eq!(t.bernoulli_max, 1e-8);
        let text = format!("{MINIMAL}\n[tolerances.monitors]\nno_such_key = 1.0\n");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_bad_gamma_and_tau_m() {
        let text = MINIMAL.replace("gamma = 0.5", "gamma = 1.5");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
        let text = MINIMAL.replace("r = 0.9", "r = 0.9\ntau_m = 0.05");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
        let text = MINIMAL.replace("dt = 1e-3", "dt = -1e-3");
        assert!(matches!(RunConfig::from_toml(&text), Err(ConfigError::Invalid(_))));
    }
}
