//! End-to-end runs of the bundled configs through the library.

mod common;

use common::{ideal_config, reference_config};
use sonic_patch::error::Error;
use sonic_patch::inversion::Tag;
use sonic_patch::output::{patch_bytes, run_artifacts, to_json, write_files, RunManifest, PATCH_CSV, PATCH_REFINED_CSV, RUN_JSON};
use sonic_patch::pipeline::{closure_constant, run_config, setup};
use sonic_patch::verify::suite::{verify_artifacts, verify_run, VerifiedRun};
use std::sync::OnceLock;

fn reference() -> &'static VerifiedRun {
    static RUN: OnceLock<VerifiedRun> = OnceLock::new();
    RUN.get_or_init(|| verify_run(&reference_config()).expect("reference run"))
}

#[test]
fn reference_run_passes_every_mandatory_check() {
    let r = &reference().report;
    assert!(r.passed(), "failed: {:?}", r.failed_checks());
}

#[test]
fn every_criterion_appears_exactly_once() {
    let r = &reference().report;
    for n in 1..=10u8 {
        assert_eq!(r.checks.iter().filter(|c| c.criterion == Some(n)).count(), 1, "criterion {n}");
    }
    let mut names: Vec<&str> = r.checks.iter().map(|c| c.name.as_str()).collect();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), r.checks.len());
}

#[test]
fn hodograph_unknowns_stay_positive() {
    let run = &reference().base;
    for l in &run.field.levels {
        assert!(l.x.iter().chain(&l.y).all(|v| *v > 0.0));
        assert!(l.coef.iter().all(|c| c.ep > 0.0 && c.em > 0.0));
    }
    assert!(run.map.min_jacobian() > 0.0);
}

#[test]
fn patch_is_bounded_by_the_no_curve_and_the_data_curve() {
    let run = &reference().base;
    let nodes = &run.patch.nodes;
    for tag in [Tag::Lm, Tag::Mn, Tag::No, Tag::Interior] {
        assert!(nodes.iter().any(|n| n.tag == tag), "{tag:?}");
    }
    assert!(nodes.iter().all(|n| (-1e-12..=1.0 + 1e-12).contains(&n.s)));
    assert!(nodes.iter().all(|n| n.t <= run.patch.delta_bar * (1.0 + 1e-12)));
    assert!(nodes.iter().filter(|n| n.tag == Tag::Mn).all(|n| n.t == 0.0));
    assert!(run.patch.bernoulli_residuals(&reference().setup.gas).iter().all(|r| r.abs() <= 1e-8));
}

#[test]
fn closure_constant_is_stable_under_halving() {
    let v = reference();
    let (c1, c2) = (closure_constant(&v.base.field), closure_constant(&v.refined.field));
    assert!(c1 > 0.0 && ((c1 - c2) / c1).abs() <= 0.1);
}

#[test]
fn sonic_line_has_equal_hodograph_unknowns() {
    let s = &reference().base.field.sonic;
    let last = reference().base.field.last();
    // X̃ − Ỹ = 2tW̃ on the last level, and X̃ = Ỹ at t = 0 by construction
    for j in 0..last.len() {
        let d = last.x[j] - last.y[j];
        assert!((d - 2.0 * last.t * last.w[j]).abs() <= 1e-9 * last.x[j].abs());
    }
    assert!(s.xy.iter().all(|v| *v > 0.0));
}

#[test]
fn reruns_are_byte_identical() {
    let cfg = reference_config();
    let st = setup(&cfg).unwrap();
    let a = run_config(&cfg, &st).unwrap();
    let b = run_config(&cfg, &st).unwrap();
    assert_eq!(run_artifacts(&a, true, true, true), run_artifacts(&b, true, true, true));
}

#[test]
fn written_artifacts_verify_offline() {
    let v = reference();
    let cfg = reference_config();
    let dir = tempfile::tempdir().unwrap();
    let manifest = RunManifest::new(&cfg, &v.setup, &v.base, &v.refined);
    let mut files = run_artifacts(&v.base, false, false, true);
    files.push((PATCH_REFINED_CSV, patch_bytes(&v.refined.patch)));
    files.push((RUN_JSON, to_json(&manifest)));
    write_files(dir.path(), &files).unwrap();
    let offline = verify_artifacts(dir.path()).unwrap();
    assert!(offline.passed(), "failed: {:?}", offline.failed_checks());
    let a = offline.get("pde_residuals").unwrap();
    let b = v.report.get("pde_residuals").unwrap();
    assert_eq!(a.value, b.value);
}

#[test]
fn offline_verification_reports_missing_files() {
    let dir = tempfile::tempdir().unwrap();
    let err = verify_artifacts(dir.path()).unwrap_err();
    assert!(matches!(err, Error::Artifact { .. }), "{err}");
    std::fs::write(dir.path().join(PATCH_CSV), "not,a,patch\n").unwrap();
    assert!(verify_artifacts(dir.path()).is_err());
}

#[test]
fn ideal_config_passes() {
    let v = verify_run(&ideal_config()).unwrap();
    assert!(v.report.passed(), "failed: {:?}", v.report.failed_checks());
    let x = v.report.criterion(9).unwrap();
    assert!(x.pass);
}
