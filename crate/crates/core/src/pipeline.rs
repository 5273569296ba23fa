//! Boundary → domain → march → inversion for one grid, and the setup of the
//! gas window shared by all runs of a config.

use crate::boundary::{build_boundary, build_boundary_on, hodograph_boundary_inverse, BoundaryData, BoundaryTrace, StreamlineSpec};
use crate::config::{ConfigError, GridConfig, RunConfig, Thresholds};
use crate::error::Error;
use crate::gas::{admissible_tau_threshold, default_search_window, GasParams, TauWindow, Thermo};
use crate::hodograph::{build_domain, march, regularity_monitors, DomainOmega, GridSpec, HodographField, MarchTolerances, RegularityReport};
use crate::inversion::{
    characteristic_no, check_injectivity, extract_sonic_curve, integrate_inversion, reconstruct, InjectivityReport,
    InversionMap, NoCurve, PatchSolution, SonicCurve,
};
use serde::Serialize;

/// Factor between the admissibility threshold τ₁ and the default τ_M.
pub const TAU_M_FACTOR: f64 = 1.1;

/// Gas, validated τ window and streamline of a config.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Setup {
    pub gas: GasParams,
    pub tau_threshold: f64,
    pub window: TauWindow,
    pub spec: StreamlineSpec,
}

/// Resolves τ₁, the τ window and τ_M. Failures here are configuration
/// errors: the gas or the sonic state is not admissible.
pub fn setup(cfg: &RunConfig) -> Result<Setup, Error> {
    setup_for(&cfg.gas, cfg)
}

/// Same as [`setup`] with the gas of the config replaced.
pub fn setup_for(gas: &GasParams, cfg: &RunConfig) -> Result<Setup, Error> {
    let invalid = |e: &dyn std::fmt::Display| Error::Config(ConfigError::Invalid(e.to_string()));
    gas.validate().map_err(|e| invalid(&e))?;
    let search = default_search_window(gas);
    let tau1 = admissible_tau_threshold(gas, search).map_err(|e| invalid(&e))?;
    let window = TauWindow::new(gas, tau1, search.1, tau1, cfg.tolerances.tau_rtol).map_err(|e| invalid(&e))?;
    let tau_m = cfg.streamline.tau_m.unwrap_or(TAU_M_FACTOR * tau1);
    if !window.contains(tau_m) {
        return Err(invalid(&format!(
            "tau_m = {tau_m} lies outside the admissible window [{}, {}]",
            window.tau_min, window.tau_max
        )));
    }
    let spec = cfg.streamline.spec(tau_m);
    spec.validate().map_err(|e| invalid(&e))?;
    Ok(Setup { gas: *gas, tau_threshold: tau1, window, spec })
}

/// Everything computed on one (Δt, Δz) grid.
#[derive(Debug, Clone)]
pub struct PatchRun {
    /// Boundary data over the positivity window [ξ₀, ξ₂].
    pub boundary: BoundaryData,
    /// Boundary data on t ∈ [0, δ] used by the solver.
    pub solver_boundary: BoundaryData,
    pub trace: BoundaryTrace,
    pub domain: DomainOmega,
    pub field: HodographField,
    pub regularity: RegularityReport,
    pub map: InversionMap,
    pub no: NoCurve,
    pub patch: PatchSolution,
    pub injectivity: InjectivityReport,
    pub sonic: SonicCurve,
}

/// Grid of a run `level` times halved from the configured one.
pub fn refined_grid(grid: &GridConfig, level: u32) -> GridConfig {
    let f = 0.5f64.powi(level as i32);
    GridConfig { dt: grid.dt * f, dz: grid.dz.map(|dz| dz * f), ..*grid }
}

pub fn run_patch(
    spec: &StreamlineSpec,
    gas: &impl Thermo,
    window: &TauWindow,
    grid: &GridConfig,
    th: &Thresholds,
    seed: u64,
) -> Result<PatchRun, Error> {
    let boundary = build_boundary(spec, gas, window, grid.n_boundary)?;
    let coarse_trace = hodograph_boundary_inverse(&boundary)?;
    let dom0 = build_domain(&boundary, &coarse_trace, gas, window)?;
    let solver_boundary = build_boundary_on(spec, gas, window, dom0.delta, grid.n_boundary)?;
    let trace = hodograph_boundary_inverse(&solver_boundary)?;
    let domain = dom0.anchored(&trace)?;
    let gs = match grid.dz {
        Some(dz) => GridSpec { dt: grid.dt, dz },
        None => GridSpec::auto(&domain, grid.dt, grid.z_per_t),
    };
    let tol = MarchTolerances { w_tilde_max: th.w_tilde_max, containment_slack: th.containment_slack };
    let field = march(&trace, &domain, gas, window, gs, tol)?;
    let regularity = regularity_monitors(&field, seed);
    let map = integrate_inversion(&field, &trace, gas, window)?;
    let no = characteristic_no(&field, &map, &trace)?;
    let patch = reconstruct(&map, &field, &no, gas, window)?;
    let injectivity = check_injectivity(&patch, &map, th.injectivity_tol);
    let sonic = extract_sonic_curve(&patch, &field, seed);
    Ok(PatchRun { boundary, solver_boundary, trace, domain, field, regularity, map, no, patch, injectivity, sonic })
}

/// The configured run on the configured grid.
pub fn run_config(cfg: &RunConfig, setup: &Setup) -> Result<PatchRun, Error> {
    run_patch(&setup.spec, &setup.gas, &setup.window, &cfg.grid, &cfg.thresholds()?, cfg.seed)
}

/// max|X̃ − Ỹ| on the lowest level divided by its t = Δt.
pub fn closure_constant(field: &HodographField) -> f64 {
    let l = field.last();
    l.x.iter().zip(&l.y).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / l.t
}
