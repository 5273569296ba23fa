//! CSV and JSON artifacts. Floats are written in shortest round-trip form,
//! so identical runs produce identical bytes.

use crate::boundary::BoundaryData;
use crate::config::RunConfig;
use crate::error::Error;
use crate::hodograph::{DomainOmega, GridSpec, HodographField, MarchMonitors, RegularityReport};
use crate::inversion::{InjectivityReport, PatchNode, PatchSolution, SonicCurve};
use crate::pipeline::{PatchRun, Setup};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

pub const BOUNDARY_CSV: &str = "boundary.csv";
pub const FIELD_CSV: &str = "field.csv";
pub const PATCH_CSV: &str = "patch.csv";
pub const PATCH_REFINED_CSV: &str = "patch_refined.csv";
pub const SONIC_CSV: &str = "sonic.csv";
pub const MONITORS_JSON: &str = "monitors.json";
pub const RUN_JSON: &str = "run.json";
pub const REPORT_JSON: &str = "report.json";

fn csv_err(e: csv::Error) -> std::io::Error {
    std::io::Error::other(e)
}

#[derive(Serialize)]
struct BoundaryRow {
    xi: f64,
    theta: f64,
    wbar: f64,
    c: f64,
    tau: f64,
    phi: f64,
    a: f64,
    b: f64,
    d: f64,
    z: f64,
    t: f64,
}

pub fn write_boundary_csv(w: impl Write, bd: &BoundaryData) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for i in 0..bd.len() {
        out.serialize(BoundaryRow {
            xi: bd.xi[i],
            theta: bd.theta[i],
            wbar: bd.wbar[i],
            c: bd.c[i],
            tau: bd.tau[i],
            phi: bd.phi[i],
            a: bd.a[i],
            b: bd.b[i],
            d: bd.d[i],
            z: bd.z[i],
            t: bd.t[i],
        })
        .map_err(csv_err)?;
    }
    out.flush()
}

#[derive(Serialize)]
struct FieldRow {
    level: usize,
    t: f64,
    z: f64,
    x_tilde: f64,
    y_tilde: f64,
    w_tilde: f64,
    tau: f64,
    c: f64,
}

/// One row per node and level, followed by the sonic trace at t = 0.
pub fn write_field_csv(w: impl Write, field: &HodographField) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for (k, l) in field.levels.iter().enumerate() {
        for j in 0..l.len() {
            out.serialize(FieldRow {
                level: k,
                t: l.t,
                z: l.z[j],
                x_tilde: l.x[j],
                y_tilde: l.y[j],
                w_tilde: l.w[j],
                tau: l.coef[j].tau,
                c: l.coef[j].c,
            })
            .map_err(csv_err)?;
        }
    }
    let s = &field.sonic;
    for j in 0..s.z.len() {
        out.serialize(FieldRow {
            level: field.levels.len(),
            t: 0.0,
            z: s.z[j],
            x_tilde: s.xy[j],
            y_tilde: s.xy[j],
            w_tilde: s.w[j],
            tau: s.tau[j],
            c: s.c[j],
        })
        .map_err(csv_err)?;
    }
    out.flush()
}

/// Columns xi, eta, u, v, tau, c, theta, wbar, tag, then the hodograph
/// coordinates and the level, which the offline verification needs.
pub fn write_patch_csv(w: impl Write, patch: &PatchSolution) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for n in &patch.nodes {
        out.serialize(n).map_err(csv_err)?;
    }
    out.flush()
}

pub fn read_patch_csv(path: &Path) -> Result<Vec<PatchNode>, Error> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| Error::artifact(path, e))?;
    rd.deserialize().collect::<Result<Vec<PatchNode>, _>>().map_err(|e| Error::artifact(path, e))
}

#[derive(Serialize)]
struct SonicRow {
    xi: f64,
    eta: f64,
    tangent_angle: f64,
}

pub fn write_sonic_csv(w: impl Write, sc: &SonicCurve) -> std::io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for i in 0..sc.xi.len() {
        out.serialize(SonicRow { xi: sc.xi[i], eta: sc.eta[i], tangent_angle: sc.tangent_angle[i] })
            .map_err(csv_err)?;
    }
    out.flush()
}

/// Monitor values of one run.
#[derive(Serialize)]
pub struct MonitorSummary<'a> {
    pub domain: &'a DomainOmega,
    pub grid: &'a GridSpec,
    pub march: &'a MarchMonitors,
    pub regularity: &'a RegularityReport,
    pub injectivity: &'a InjectivityReport,
    pub delta_bar: f64,
    pub no_landing_error: f64,
    pub no_slope_residual_max: f64,
    pub no_slope_residual_rms: f64,
    pub jacobian_min: f64,
    pub jacobian_max: f64,
    pub patch_nodes: usize,
    pub sonic_grad_sq_min: f64,
    pub sonic_grad_sq_max: f64,
}

pub fn monitor_summary(run: &PatchRun) -> MonitorSummary<'_> {
    MonitorSummary {
        domain: &run.domain,
        grid: &run.field.grid,
        march: &run.field.monitors,
        regularity: &run.regularity,
        injectivity: &run.injectivity,
        delta_bar: run.no.delta_bar,
        no_landing_error: run.no.landing_error,
        no_slope_residual_max: run.no.slope_residual_max,
        no_slope_residual_rms: run.no.slope_residual_rms,
        jacobian_min: run.map.min_jacobian(),
        jacobian_max: run.map.max_jacobian(),
        patch_nodes: run.patch.nodes.len(),
        sonic_grad_sq_min: run.sonic.grad_sq_min,
        sonic_grad_sq_max: run.sonic.grad_sq_max,
    }
}

/// What the offline verification needs besides the patch CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub config: RunConfig,
    pub tau_threshold: f64,
    pub tau_m: f64,
    pub phi_m: f64,
    pub delta_bar: f64,
    pub delta_bar_refined: f64,
    pub dt: f64,
    pub dt_refined: f64,
}

impl RunManifest {
    pub fn new(cfg: &RunConfig, setup: &Setup, base: &PatchRun, refined: &PatchRun) -> Self {
        Self {
            schema_version: crate::verify::report::SCHEMA_VERSION,
            config: cfg.clone(),
            tau_threshold: setup.tau_threshold,
            tau_m: setup.spec.tau_m,
            phi_m: base.patch.phi_m,
            delta_bar: base.patch.delta_bar,
            delta_bar_refined: refined.patch.delta_bar,
            dt: base.field.grid.dt,
            dt_refined: refined.field.grid.dt,
        }
    }
}

pub fn to_json(value: &impl Serialize) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(value).expect("artifact structs serialize");
    v.push(b'\n');
    v
}

fn bytes(f: impl FnOnce(&mut Vec<u8>) -> std::io::Result<()>) -> Vec<u8> {
    let mut v = Vec::new();
    f(&mut v).expect("writing to memory cannot fail");
    v
}

/// The artifacts of one grid as (file name, bytes), in a fixed order.
pub fn run_artifacts(run: &PatchRun, boundary: bool, field: bool, patch: bool) -> Vec<(&'static str, Vec<u8>)> {
    let mut out = Vec::new();
    if boundary {
        out.push((BOUNDARY_CSV, bytes(|v| write_boundary_csv(v, &run.boundary))));
    }
    if field {
        out.push((FIELD_CSV, bytes(|v| write_field_csv(v, &run.field))));
    }
    if patch {
        out.push((PATCH_CSV, bytes(|v| write_patch_csv(v, &run.patch))));
    }
    out.push((SONIC_CSV, bytes(|v| write_sonic_csv(v, &run.sonic))));
    out.push((MONITORS_JSON, to_json(&monitor_summary(run))));
    out
}

pub fn patch_bytes(patch: &PatchSolution) -> Vec<u8> {
    bytes(|v| write_patch_csv(v, patch))
}

pub fn write_files(dir: &Path, files: &[(&str, Vec<u8>)]) -> Result<(), Error> {
    std::fs::create_dir_all(dir).map_err(|e| Error::artifact(dir, e))?;
    for (name, data) in files {
        let path = dir.join(name);
        std::fs::write(&path, data).map_err(|e| Error::artifact(&path, e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inversion::Tag;

    #[test]
    fn patch_csv_roundtrip_keeps_bits() {
        let node = PatchNode {
            xi: -1.2345678901234567e-4,
            eta: 1.0 / 3.0,
            u: 0.1,
            v: -0.2,
            tau: 0.056,
            c: 43.0,
            theta: -0.7,
            wbar: 0.99999,
            tag: Tag::No,
            t: 1e-3,
            z: -2e-5,
            s: 0.0,
            x_tilde: 0.33,
            y_tilde: 0.34,
            level: 3,
        };
        let patch = PatchSolution { nodes: vec![node; 2], phi_m: -1.0, delta_bar: 0.01 };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(PATCH_CSV);
        std::fs::write(&path, patch_bytes(&patch)).unwrap();
        let back = read_patch_csv(&path).unwrap();
        assert_eq!(back, patch.nodes);
        let head = String::from_utf8(patch_bytes(&patch)).unwrap();
        assert!(head.starts_with("xi,eta,u,v,tau,c,theta,wbar,tag,"));
    }
}
