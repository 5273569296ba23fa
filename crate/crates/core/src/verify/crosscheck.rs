//! Ideal-gas dual path: the same config is run through the general van der
//! Waals closure with a = b = 0 and through the closed-form constant-κ gas,
//! and every field array is compared.

use crate::config::RunConfig;
use crate::error::Error;
use crate::gas::{GasParams, IdealGas};
use crate::inversion::PatchNode;
use crate::pipeline::{run_patch, setup_for, PatchRun};
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossCheck {
    /// Largest difference over all compared arrays, each relative to the
    /// largest magnitude in its array.
    pub field_max_rel: f64,
    /// Hausdorff distance between the two sonic curves.
    pub sonic_hausdorff: f64,
    /// sup |κ′| seen by the general path; zero when the κ′ terms drop out.
    pub kappa_prime_sup: f64,
    pub nodes: usize,
}

/// Gas of the dual path: the config's K and γ with a = b = 0.
pub fn ideal_twin(gas: &GasParams) -> GasParams {
    GasParams { a: 0.0, b: 0.0, ..*gas }
}

pub fn ideal_gas_crosscheck(cfg: &RunConfig) -> Result<CrossCheck, Error> {
    let general = ideal_twin(&cfg.gas);
    let closed = IdealGas { k: general.k, gamma: general.gamma };
    let st = setup_for(&general, cfg)?;
    let th = cfg.thresholds()?;
    let a = run_patch(&st.spec, &general, &st.window, &cfg.grid, &th, cfg.seed)?;
    let b = run_patch(&st.spec, &closed, &st.window, &cfg.grid, &th, cfg.seed)?;
    Ok(compare(&a, &b))
}

fn compare(a: &PatchRun, b: &PatchRun) -> CrossCheck {
    let kappa_prime_sup =
        a.field.levels.iter().flat_map(|l| l.coef.iter()).map(|c| c.kappa_prime.abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    let mut nodes = 0;
    let same_layout = a.field.levels.len() == b.field.levels.len()
        && a.field.levels.iter().zip(&b.field.levels).all(|(p, q)| p.len() == q.len())
        && a.patch.nodes.len() == b.patch.nodes.len()
        && a.map.levels.len() == b.map.levels.len();
    if !same_layout {
        worst = f64::INFINITY;
    } else {
        for (p, q) in a.field.levels.iter().zip(&b.field.levels) {
            nodes += p.len();
            for (u, v) in [(&p.z, &q.z), (&p.x, &q.x), (&p.y, &q.y), (&p.w, &q.w), (&p.tau(), &q.tau()), (&p.c(), &q.c())] {
                worst = worst.max(rel_diff(u, v));
            }
        }
        for (p, q) in a.map.levels.iter().zip(&b.map.levels) {
            for (u, v) in [(&p.xi, &q.xi), (&p.eta, &q.eta), (&p.theta, &q.theta), (&p.jac, &q.jac)] {
                worst = worst.max(rel_diff(u, v));
            }
        }
        let col = |r: &PatchRun, f: fn(&PatchNode) -> f64| r.patch.nodes.iter().map(f).collect::<Vec<f64>>();
        let fields: [fn(&PatchNode) -> f64; 5] = [|n| n.u, |n| n.v, |n| n.tau, |n| n.c, |n| n.wbar];
        for f in fields {
            worst = worst.max(rel_diff(&col(a, f), &col(b, f)));
        }
    }
    let pa: Vec<(f64, f64)> = a.sonic.xi.iter().copied().zip(a.sonic.eta.iter().copied()).collect();
    let pb: Vec<(f64, f64)> = b.sonic.xi.iter().copied().zip(b.sonic.eta.iter().copied()).collect();
    CrossCheck { field_max_rel: worst, sonic_hausdorff: hausdorff(&pa, &pb), kappa_prime_sup, nodes }
}

/// max|a − b| over max(|a|, |b|) of the whole array.
pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let scale = a.iter().chain(b).map(|v| v.abs()).fold(0.0, f64::max);
    let d = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    if scale == 0.0 {
        d
    } else {
        d / scale
    }
}

/// Symmetric Hausdorff distance between two point sets.
pub fn hausdorff(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { f64::INFINITY };
    }
    let one_way = |p: &[(f64, f64)], q: &[(f64, f64)]| {
        p.iter()
            .map(|x| q.iter().map(|y| (x.0 - y.0).hypot(x.1 - y.1)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hausdorff_of_shifted_sets() {
        let a = [(0.0, 0.0), (1.0, 0.0)];
        let b = [(0.0, 0.5), (1.0, 0.0), (2.0, 0.0)];
        assert_eq!(hausdorff(&a, &b), 1.0);
        assert_eq!(hausdorff(&a, &a), 0.0);
    }

    #[test]
    fn relative_difference_uses_array_scale() {
        assert_eq!(rel_diff(&[2.0, 0.0], &[2.0, 1e-3]), 5e-4);
        assert_eq!(rel_diff(&[1.0], &[1.0, 2.0]), f64::INFINITY);
    }
}
