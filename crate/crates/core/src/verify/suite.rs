//! A verified run: the configured grid, its Δt/Δz-halved refinement, the
//! identity suites, the dual-path check, a thread-count determinism check
//! and the report with one check per acceptance criterion.

use super::crosscheck::{ideal_gas_crosscheck, CrossCheck};
use super::holder::{synthetic_validation, SYNTHETIC_TOLERANCE};
use super::identities::{compat_order, eigen_suite, thermo_suite, transcription_suite};
use super::report::{Check, Measure, VerificationReport};
use super::residuals::{convergence_table, run_residual_suite, PatchResiduals, ResidualRegion};
use crate::config::{defaults_version, RunConfig, Thresholds};
use crate::error::Error;
use crate::gas::Thermo;
use crate::output::{patch_bytes, run_artifacts};
use crate::pipeline::{closure_constant, refined_grid, run_config, run_patch, setup, PatchRun, Setup};

/// Thread counts compared by the determinism check.
pub const DETERMINISM_THREADS: [usize; 2] = [1, 8];

pub struct VerifiedRun {
    pub setup: Setup,
    pub base: PatchRun,
    pub refined: PatchRun,
    pub report: VerificationReport,
}

pub fn verify_run(cfg: &RunConfig) -> Result<VerifiedRun, Error> {
    let th = cfg.thresholds()?;
    let st = setup(cfg)?;
    let base = run_config(cfg, &st)?;
    let refined = run_patch(&st.spec, &st.gas, &st.window, &refined_grid(&cfg.grid, 1), &th, cfg.seed)?;
    let mut report = VerificationReport::new(defaults_version());
    let grid_label = format!("dt={}/{}", base.field.grid.dt, refined.field.grid.dt);

    report.push(thermo_check(&st, &th, base.domain.phi_m, cfg.seed));
    report.push(eigen_check(&th, cfg.seed));
    report.push(boundary_check(cfg, &st, &th, &base));
    report.push(transcription_check(&st, &th, cfg.seed));
    report.push(monitor_check(&base));
    report.push(closure_check(&th, &base, &refined));
    report.push(holder_check(&th, &base, cfg.seed));
    let residuals = residual_pair(&base, &refined, &st.gas);
    match &residuals {
        Ok((c, f)) => {
            report.convergence = convergence_table(c, f, &grid_label);
            report.push(residual_check(&th, c, f));
        }
        Err(e) => report.push(Check::errored(Some(8), "pde_residuals", true, e)),
    }
    report.push(match ideal_gas_crosscheck(cfg) {
        Ok(x) => crosscheck_check(&th, &x),
        Err(e) => Check::errored(Some(9), "ideal_gas_dual_path", true, e),
    });
    report.push(match determinism(cfg, &st, &base) {
        Ok(mismatches) => Check::new(
            Some(10),
            "determinism",
            true,
            vec![Measure::at_most("artifacts_differing_across_thread_counts", mismatches as f64, 0.0)],
        ),
        Err(e) => Check::errored(Some(10), "determinism", true, e),
    });

    report.push(Check::new(
        None,
        "injectivity",
        true,
        vec![
            Measure::at_most("collisions", base.injectivity.collisions as f64, 0.0),
            Measure::at_most(
                "mixed_orientation",
                base.injectivity.orientation_negative.min(base.injectivity.orientation_positive) as f64,
                0.0,
            ),
            Measure::report("min_cross_level_distance", base.injectivity.min_cross_level_distance),
        ],
    ));
    report.push(Check::new(
        None,
        "no_landing",
        true,
        vec![
            Measure::at_most("landing_error_in_dz", base.no.landing_error, th.no_landing_max),
            Measure::report("delta_bar", base.no.delta_bar),
        ],
    ));
    report.push(diagnostics(&th, &base, &refined));
    Ok(VerifiedRun { setup: st, base, refined, report })
}

pub fn thermo_check(st: &Setup, th: &Thresholds, phi_m: f64, seed: u64) -> Check {
    let s = thermo_suite(&st.gas, &st.window, phi_m, seed);
    Check::new(
        Some(1),
        "thermodynamic_identities",
        true,
        vec![
            Measure::at_most("sound_speed_identity", s.sound_speed_identity, th.c2_identity_max),
            Measure::at_most("ideal_kappa", s.ideal_kappa, 0.0),
            Measure::at_most("kappa_prime_fd", s.kappa_prime_fd, th.kappa_prime_fd_max),
            Measure::at_most("bernoulli_roundtrip", s.bernoulli_roundtrip, th.bernoulli_roundtrip_max),
        ],
    )
}

pub fn eigen_check(th: &Thresholds, seed: u64) -> Check {
    let s = eigen_suite(seed);
    Check::new(
        Some(2),
        "eigenstructure",
        true,
        vec![
            Measure::at_most("quadratic_residual", s.quadratic, th.eigen_quadratic_max),
            Measure::at_most("tangent_residual", s.tangent, th.eigen_tangent_max),
            Measure::report("states", s.states as f64),
        ],
    )
}

pub fn boundary_check(cfg: &RunConfig, st: &Setup, th: &Thresholds, base: &PatchRun) -> Check {
    let identity = base.boundary.identity_residual().max(base.solver_boundary.identity_residual());
    let order = compat_order(&st.spec, &st.gas, &st.window, base.boundary.t0(), cfg.grid.n_boundary);
    let order = match order {
        Ok((o, n)) => vec![
            Measure::at_least("compat_ode_order", o, th.compat_order_min),
            Measure::report("compat_ode_steps", n as f64),
        ],
        Err(_) => vec![Measure::failed("compat_ode_order")],
    };
    Check::new(
        Some(3),
        "boundary_compatibility",
        true,
        std::iter::once(Measure::at_most("identity_residual", identity, th.boundary_identity_max)).chain(order).collect(),
    )
}

pub fn transcription_check(st: &Setup, th: &Thresholds, seed: u64) -> Check {
    let s = transcription_suite(&st.gas, &st.window, seed);
    Check::new(
        Some(4),
        "transcription_oracle",
        true,
        vec![Measure::at_most("max_rel", s.max_rel, th.transcription_max), Measure::report("states", s.states as f64)],
    )
}

pub fn monitor_check(base: &PatchRun) -> Check {
    let m = &base.field.monitors;
    Check::new(
        Some(5),
        "reference_monitors",
        true,
        vec![
            Measure::positive("min_x_tilde", m.min_x_tilde),
            Measure::positive("min_y_tilde", m.min_y_tilde),
            Measure::positive("min_denominator_plus", m.min_ep),
            Measure::positive("min_denominator_minus", m.min_em),
            Measure::at_least("min_containment_in_dz", m.min_containment, 0.0),
            Measure::positive("J strictly one-signed (J>0 with ∇φ=(U,V))", base.map.min_jacobian()),
        ],
    )
}

pub fn closure_check(th: &Thresholds, base: &PatchRun, refined: &PatchRun) -> Check {
    let (c0, c1) = (closure_constant(&base.field), closure_constant(&refined.field));
    Check::new(
        Some(6),
        "sonic_closure",
        true,
        vec![
            Measure::at_most("closure_constant_spread", (c1 / c0 - 1.0).abs(), th.closure_c_spread),
            Measure::report("closure_constant", c0),
            Measure::report("closure_constant_refined", c1),
        ],
    )
}

pub fn holder_check(th: &Thresholds, base: &PatchRun, seed: u64) -> Check {
    let synthetic = Measure::at_most("synthetic_alpha_error", synthetic_validation(seed), SYNTHETIC_TOLERANCE);
    match &base.regularity.holder_sonic {
        Ok(f) => Check::new(
            Some(7),
            "holder_sonic_trace",
            true,
            vec![
                Measure::at_least("alpha", f.alpha, th.holder_alpha_min),
                Measure::at_least("r2", f.r2, th.holder_r2_min),
                synthetic,
            ],
        ),
        Err(e) => Check::errored(Some(7), "holder_sonic_trace", true, e),
    }
}

pub fn residual_pair(base: &PatchRun, refined: &PatchRun, gas: &impl Thermo) -> Result<(PatchResiduals, PatchResiduals), Error> {
    let region = ResidualRegion::default();
    Ok((run_residual_suite(&base.patch, gas, &region)?, run_residual_suite(&refined.patch, gas, &region)?))
}

/// Criterion 8 from the residuals of a grid pair.
pub fn residual_check(th: &Thresholds, coarse: &PatchResiduals, fine: &PatchResiduals) -> Check {
    let mut ms = Vec::new();
    for row in convergence_table(coarse, fine, "") {
        ms.push(Measure::at_least(&format!("{}_order", row.residual), row.order, th.residual_order_min));
    }
    ms.push(Measure::at_most("angle_plus_fine_max", fine.angle_plus.max, th.residual_max));
    ms.push(Measure::at_most("angle_minus_fine_max", fine.angle_minus.max, th.residual_max));
    ms.push(Measure::at_most("irrotationality_fine_max", fine.irrotationality.max, th.residual_max));
    ms.push(Measure::at_most("bernoulli_max", coarse.bernoulli.max.max(fine.bernoulli.max), th.bernoulli_max));
    ms.push(Measure::report("points_fine", fine.points as f64));
    Check::new(Some(8), "pde_residuals", true, ms)
}

pub fn crosscheck_check(th: &Thresholds, x: &CrossCheck) -> Check {
    Check::new(
        Some(9),
        "ideal_gas_dual_path",
        true,
        vec![
            Measure::at_most("field_max_rel", x.field_max_rel, th.crosscheck_field_max),
            Measure::at_most("sonic_hausdorff", x.sonic_hausdorff, th.crosscheck_hausdorff_max),
            Measure::at_most("kappa_prime_sup", x.kappa_prime_sup, 0.0),
        ],
    )
}

/// Reruns the configured grid on private pools of 1 and 8 threads and
/// counts the artifacts whose bytes differ from those of `base`.
pub fn determinism(cfg: &RunConfig, st: &Setup, base: &PatchRun) -> Result<usize, Error> {
    let bytes = |r: &PatchRun| {
        let mut v = run_artifacts(r, true, true, false);
        v.push(("patch", patch_bytes(&r.patch)));
        v
    };
    let reference = bytes(base);
    let mut mismatches = 0;
    for n in DETERMINISM_THREADS {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build().map_err(|e| Error::Threads(e.to_string()))?;
        let run = pool.install(|| run_config(cfg, st))?;
        mismatches += bytes(&run).iter().zip(&reference).filter(|(a, b)| a != b).count();
    }
    Ok(mismatches)
}

pub fn diagnostics(th: &Thresholds, base: &PatchRun, refined: &PatchRun) -> Check {
    let mut ms = Vec::new();
    match &base.sonic.holder_fit {
        Ok(f) => {
            ms.push(Measure::at_least("sonic_tangent_mu", f.alpha, th.sonic_mu_min));
            ms.push(Measure::at_least("sonic_tangent_r2", f.r2, th.sonic_mu_r2_min));
        }
        Err(_) => ms.push(Measure::failed("sonic_tangent_mu")),
    }
    let (w0, w1) = (base.regularity.sup_w_tilde, refined.regularity.sup_w_tilde);
    ms.push(Measure::at_most("sup_w_tilde_spread", (w1 / w0 - 1.0).abs(), th.sup_w_spread));
    ms.push(Measure::positive("sonic_grad_sq_min", base.sonic.grad_sq_min));
    ms.push(Measure::report("no_slope_residual_max", base.no.slope_residual_max));
    ms.push(Measure::report("no_slope_residual_max_refined", refined.no.slope_residual_max));
    ms.push(Measure::report("grad_exponent", base.regularity.grad_exponent.unwrap_or(f64::NAN)));
    ms.push(Measure::report("bounds_window_ok", if base.regularity.bounds_ok { 1.0 } else { 0.0 }));
    Check::new(None, "diagnostics", false, ms)
}

/// Re-evaluates the artifact-based checks from a run directory: Bernoulli
/// on every stored node and, when the refined patch was dumped too, the
/// residual orders.
pub fn verify_artifacts(dir: &std::path::Path) -> Result<VerificationReport, Error> {
    use crate::inversion::PatchSolution;
    use crate::output::{read_patch_csv, RunManifest, PATCH_CSV, PATCH_REFINED_CSV, RUN_JSON};
    let mpath = dir.join(RUN_JSON);
    let text = std::fs::read_to_string(&mpath).map_err(|e| Error::artifact(&mpath, e))?;
    let man: RunManifest = serde_json::from_str(&text).map_err(|e| Error::artifact(&mpath, e))?;
    let th = man.config.thresholds()?;
    let gas = man.config.gas;
    let base = PatchSolution { nodes: read_patch_csv(&dir.join(PATCH_CSV))?, phi_m: man.phi_m, delta_bar: man.delta_bar };
    let mut report = VerificationReport::new(defaults_version());
    let bern = base.bernoulli_residuals(&gas).into_iter().fold(0.0f64, |a, b| a.max(b.abs()));
    report.push(Check::new(None, "bernoulli", true, vec![Measure::at_most("bernoulli_max", bern, th.bernoulli_max)]));
    let refined_path = dir.join(PATCH_REFINED_CSV);
    if refined_path.exists() {
        let refined =
            PatchSolution { nodes: read_patch_csv(&refined_path)?, phi_m: man.phi_m, delta_bar: man.delta_bar_refined };
        let region = ResidualRegion::default();
        let c = run_residual_suite(&base, &gas, &region)?;
        let f = run_residual_suite(&refined, &gas, &region)?;
        report.convergence = convergence_table(&c, &f, &format!("dt={}/{}", man.dt, man.dt_refined));
        report.push(residual_check(&th, &c, &f));
    }
    Ok(report)
}
