//! PDE residuals of the reconstructed patch.
//!
//! The scattered patch nodes are resampled onto a uniform (ξ, η) grid by
//! local least-squares planes over the 8 nearest nodes, and the residuals
//! are differenced on that grid. Bernoulli's law is checked pointwise on
//! the nodes, where it holds to the closure tolerance.

use crate::angle::{decomposition_residuals, AngleError, AngleGrids, DecompositionResiduals, Grid2, ResidualStats};
use crate::gas::Thermo;
use crate::inversion::PatchSolution;
use kiddo::{ImmutableKdTree, SquaredEuclidean};
use nalgebra::SMatrix;
use serde::{Deserialize, Serialize};
use std::num::NonZeroUsize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ResidualError {
    #[error("patch has {0} nodes, too few to resample")]
    TooFewNodes(usize),
    #[error("no resampled point falls inside the residual region")]
    EmptyRegion,
    #[error(transparent)]
    Angle(#[from] AngleError),
}

/// Neighbours per local plane.
pub const NEIGHBOURS: usize = 8;

/// Smallest accepted σ_min/σ_max of a local plane's design matrix. Planes
/// whose neighbours lie nearly on one line (a single level row) would
/// extrapolate across rows and are dropped from the residual region.
pub const MIN_PLANE_CONDITION: f64 = 0.2;

/// Part of the patch on which residuals are measured, fixed relative to
/// the patch so that it does not move under refinement: t ∈ [t_lo, t_hi]·δ̄
/// and s ∈ [s_lo, s_hi], with s the relative position between NO and the
/// data curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualRegion {
    pub t_lo: f64,
    pub t_hi: f64,
    pub s_lo: f64,
    pub s_hi: f64,
}

impl Default for ResidualRegion {
    fn default() -> Self {
        Self { t_lo: 0.25, t_hi: 0.75, s_lo: 0.15, s_hi: 0.85 }
    }
}

/// Patch fields on a uniform grid, with the mask of grid points inside the
/// region whose four neighbours are inside as well.
#[derive(Debug, Clone)]
pub struct ResampledPatch {
    pub angle: AngleGrids,
    pub u: Grid2,
    pub v: Grid2,
    pub mask: Vec<bool>,
    pub h: f64,
}

const FIELDS: usize = 8;

/// Resamples the patch with spacing twice the median nearest-neighbour
/// distance of the nodes.
pub fn resample(patch: &PatchSolution, region: &ResidualRegion) -> Result<ResampledPatch, ResidualError> {
    let nodes = &patch.nodes;
    if nodes.len() < 4 * NEIGHBOURS {
        return Err(ResidualError::TooFewNodes(nodes.len()));
    }
    let pts: Vec<[f64; 2]> = nodes.iter().map(|n| [n.xi, n.eta]).collect();
    let tree = ImmutableKdTree::new_from_slice(&pts).expect("non-empty node set");
    let k2 = NonZeroUsize::new(2).unwrap();
    let mut nn: Vec<f64> = pts
        .iter()
        .map(|p| tree.query(p).nearest_n::<SquaredEuclidean<f64>>(k2).execute()[1].distance.sqrt())
        .collect();
    nn.sort_by(f64::total_cmp);
    let h = 2.0 * nn[nn.len() / 2];
    let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        x0 = x0.min(p[0]);
        x1 = x1.max(p[0]);
        y0 = y0.min(p[1]);
        y1 = y1.max(p[1]);
    }
    let nx = ((x1 - x0) / h).floor() as usize + 1;
    let ny = ((y1 - y0) / h).floor() as usize + 1;
    let kn = NonZeroUsize::new(NEIGHBOURS).unwrap();
    let values = |i: usize| {
        let n = &nodes[i];
        [n.u, n.v, n.theta, n.wbar, n.tau, n.c, n.t, n.s]
    };
    let mut out = vec![[0.0; FIELDS]; nx * ny];
    let mut near = vec![false; nx * ny];
    for i in 0..nx {
        for j in 0..ny {
            let q = [x0 + i as f64 * h, y0 + j as f64 * h];
            let res = tree.query(&q).nearest_n::<SquaredEuclidean<f64>>(kn).execute();
            let k = i * ny + j;
            near[k] = res[0].distance.sqrt() < 2.0 * h;
            let mut a = SMatrix::<f64, NEIGHBOURS, 3>::zeros();
            let mut b = SMatrix::<f64, NEIGHBOURS, FIELDS>::zeros();
            for (r, item) in res.iter().enumerate() {
                let idx = item.item as usize;
                a[(r, 0)] = 1.0;
                a[(r, 1)] = (pts[idx][0] - q[0]) / h;
                a[(r, 2)] = (pts[idx][1] - q[1]) / h;
                for (f, v) in values(idx).into_iter().enumerate() {
                    b[(r, f)] = v;
                }
            }
            let svd = a.svd(true, true);
            let sv = svd.singular_values;
            if sv.min() < MIN_PLANE_CONDITION * sv.max() {
                near[k] = false;
            }
            match svd.solve(&b, 1e-12) {
                Ok(sol) => out[k] = std::array::from_fn(|f| sol[(0, f)]),
                Err(_) => near[k] = false,
            }
        }
    }
    let grid = |f: usize| Grid2 { xi0: x0, eta0: y0, h, nx, ny, data: out.iter().map(|v| v[f]).collect() };
    let db = patch.delta_bar;
    let inside: Vec<bool> = (0..nx * ny)
        .map(|k| {
            let (t, s) = (out[k][6], out[k][7]);
            near[k]
                && t >= region.t_lo * db
                && t <= region.t_hi * db
                && s >= region.s_lo
                && s <= region.s_hi
        })
        .collect();
    let mut mask = vec![false; nx * ny];
    for i in 1..nx.saturating_sub(1) {
        for j in 1..ny.saturating_sub(1) {
            let k = i * ny + j;
            mask[k] = inside[k] && inside[k - ny] && inside[k + ny] && inside[k - 1] && inside[k + 1];
        }
    }
    Ok(ResampledPatch {
        angle: AngleGrids { c: grid(5), theta: grid(2), wbar: grid(3), tau: grid(4) },
        u: grid(0),
        v: grid(1),
        mask,
        h,
    })
}

/// Residuals of one patch.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatchResiduals {
    pub h: f64,
    /// Grid points in the masked region.
    pub points: usize,
    pub angle_plus: ResidualStats,
    pub angle_minus: ResidualStats,
    pub irrotationality: ResidualStats,
    /// Relative Bernoulli residual at every node.
    pub bernoulli: ResidualStats,
    /// Full set of decomposition identities, for diagnostics.
    pub decomposition: DecompositionResiduals,
}

/// Computes the residual suite on one patch.
pub fn run_residual_suite(
    patch: &PatchSolution,
    gas: &impl Thermo,
    region: &ResidualRegion,
) -> Result<PatchResiduals, ResidualError> {
    let rs = resample(patch, region)?;
    residuals_of(&rs, patch, gas)
}

/// Residuals on an already resampled patch.
pub fn residuals_of(rs: &ResampledPatch, patch: &PatchSolution, gas: &impl Thermo) -> Result<PatchResiduals, ResidualError> {
    let points = rs.mask.iter().filter(|m| **m).count();
    if points == 0 {
        return Err(ResidualError::EmptyRegion);
    }
    let dec = decomposition_residuals(&rs.angle, gas, Some(&rs.mask))?;
    let (u_eta, v_xi) = (rs.u.d_eta(), rs.v.d_xi());
    let irr = ResidualStats::of(
        (0..rs.mask.len()).filter(|&k| rs.mask[k]).map(|k| u_eta.data[k] - v_xi.data[k]),
    );
    Ok(PatchResiduals {
        h: rs.h,
        points,
        angle_plus: dec.angle_plus,
        angle_minus: dec.angle_minus,
        irrotationality: irr,
        bernoulli: ResidualStats::of(patch.bernoulli_residuals(gas).into_iter()),
        decomposition: dec,
    })
}

/// One line of a two-grid convergence table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub residual: String,
    /// The grid pair, e.g. `dt=0.001/0.0005`.
    pub grid: String,
    pub coarse: f64,
    pub fine: f64,
    /// log₂(coarse/fine).
    pub order: f64,
}

/// Two-grid orders of the max residuals. Bernoulli is excluded: it is
/// enforced by the closure at every node and sits at round-off on both
/// grids, so its ratio carries no order information.
pub fn convergence_table(coarse: &PatchResiduals, fine: &PatchResiduals, grid: &str) -> Vec<ConvergenceRow> {
    [
        ("angle_plus", coarse.angle_plus.max, fine.angle_plus.max),
        ("angle_minus", coarse.angle_minus.max, fine.angle_minus.max),
        ("irrotationality", coarse.irrotationality.max, fine.irrotationality.max),
    ]
    .into_iter()
    .map(|(name, c, f)| ConvergenceRow { residual: name.into(), grid: grid.into(), coarse: c, fine: f, order: (c / f).log2() })
    .collect()
}
