//! Helpers shared by the integration tests.
#![allow(dead_code)]

use sonic_patch::config::RunConfig;
use sonic_patch::gas::{default_search_window, GasParams, TauWindow};
use std::path::PathBuf;

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

pub fn reference_config() -> RunConfig {
    RunConfig::load(&config_path("reference.toml")).expect("bundled reference config")
}

pub fn ideal_config() -> RunConfig {
    RunConfig::load(&config_path("ideal.toml")).expect("bundled ideal config")
}

pub fn reference_gas() -> GasParams {
    GasParams::new(1.0, 0.5, 0.02, 0.05).unwrap()
}

/// The default window of a gas, with its lower edge as τ₁.
pub fn default_window(gas: &GasParams) -> TauWindow {
    let (lo, hi) = default_search_window(gas);
    TauWindow::new(gas, lo, hi, lo, 1e-12).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}
