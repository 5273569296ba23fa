//! Map from the hodograph plane back to the self-similar plane.
//!
//! (θ, ξ, η) are transported along the Λ̃₊ family, which is the image of
//! the physical β-characteristics, starting from the streamline. The
//! integration reuses the corrector feet of the solver so that map and
//! field share one discretization. With ω̄ = √(1−t²), pre = t·f·ω̄/(1+tgỸ):
//!
//! ```text
//! dθ/dt = pre·(−κtω̄ + (1−t²)Ỹ/c)
//! dξ/dt = pre·Ỹ(t cosθ + ω̄ sinθ)
//! dη/dt = pre·Ỹ(t sinθ − ω̄ cosθ)
//! ```
//!
//! The closing characteristic NO is the Λ̃₋ curve through N′ = (z̄(0), 0).

use crate::boundary::BoundaryTrace;
use crate::gas::{GasError, TauWindow, Thermo};
use crate::hodograph::{coefficients, Coefficients, Foot, HodographField};
use crate::interp::{linear, locate};
use crate::verify::holder::{holder_estimate, HolderError, HolderFit};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InversionError {
    #[error("closure failed at z = {z}, t = {t}: {source}")]
    Closure { z: f64, t: f64, source: GasError },
    #[error("NO characteristic never reaches the boundary curve below t = {0}")]
    NoNotClosed(f64),
    #[error("map not injective: {0}")]
    NotInjective(String),
}

/// (θ, ξ, η, J) on one level of the field.
#[derive(Debug, Clone, PartialEq)]
pub struct MapLevel {
    pub t: f64,
    pub z: Vec<f64>,
    pub theta: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// J = φ_ξω̄_η − φ_ηω̄_ξ = c(1+κω̄²)(X−Y)/(2ω̄).
    pub jac: Vec<f64>,
}

/// Per-node images of the hodograph nodes; the last entry is t = 0.
#[derive(Debug, Clone, PartialEq)]
pub struct InversionMap {
    pub levels: Vec<MapLevel>,
}

impl InversionMap {
    pub fn sonic(&self) -> &MapLevel {
        self.levels.last().unwrap()
    }

    pub fn min_jacobian(&self) -> f64 {
        self.levels.iter().flat_map(|l| l.jac.iter().copied()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_jacobian(&self) -> f64 {
        self.levels.iter().flat_map(|l| l.jac.iter().copied()).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Rates d(θ, ξ, η)/dt along Λ̃₊ at a node.
pub fn inversion_rates(t: f64, co: &Coefficients, y_tilde: f64, theta: f64) -> [f64; 3] {
    let s = co.s;
    let pre = t * co.f * s / co.ep;
    let (sn, cs) = theta.sin_cos();
    [
        pre * (-co.kappa * t * s + (1.0 - t * t) * y_tilde / co.c),
        pre * y_tilde * (t * cs + s * sn),
        pre * y_tilde * (t * sn - s * cs),
    ]
}

/// Jacobian c(1+κω̄²)(X−Y)/(2ω̄) with X = 1/X̃ and Y = −1/Ỹ.
pub fn jacobian(co: &Coefficients, x_tilde: f64, y_tilde: f64) -> f64 {
    co.c * co.d1 * (1.0 / x_tilde + 1.0 / y_tilde) / (2.0 * co.s)
}

struct Env<'a, G: Thermo> {
    trace: &'a BoundaryTrace,
    gas: &'a G,
    window: &'a TauWindow,
    phi_m: f64,
}

impl<G: Thermo> Env<'_, G> {
    fn tau(&self, z: f64, t: f64, guess: f64) -> Result<f64, InversionError> {
        self.gas
            .solve_tau(z, t, self.phi_m, self.window, guess)
            .map_err(|source| InversionError::Closure { z, t, source })
    }

    /// Physical data and rates at the boundary point of parameter t.
    fn boundary(&self, t: f64, guess: f64) -> Result<([f64; 3], [f64; 3]), InversionError> {
        let p = self.trace.at(t);
        let (theta, xi, eta) = self.trace.physical(t);
        let tau = self.tau(p.z, t, guess)?;
        let co = coefficients(t, tau, self.gas, p.x_tilde, p.y_tilde, p.w_tilde);
        Ok(([theta, xi, eta], inversion_rates(t, &co, p.y_tilde, theta)))
    }
}

fn lerp_rows(z: &[f64], rows: &[[f64; 3]], zq: f64) -> [f64; 3] {
    let n = z.len();
    if n == 1 || zq <= z[0] {
        return rows[0];
    }
    if zq >= z[n - 1] {
        return rows[n - 1];
    }
    let i = locate(z, zq);
    let w = (zq - z[i]) / (z[i + 1] - z[i]);
    [0, 1, 2].map(|k| rows[i][k] + w * (rows[i + 1][k] - rows[i][k]))
}

/// Integrates (θ, ξ, η) over every node of the field, then takes a last
/// trapezoidal step from t = Δt onto the sonic trace, where the rates
/// vanish.
pub fn integrate_inversion(
    field: &HodographField,
    trace: &BoundaryTrace,
    gas: &impl Thermo,
    window: &TauWindow,
) -> Result<InversionMap, InversionError> {
    let env = Env { trace, gas, window, phi_m: field.domain.phi_m };
    let first = &field.levels[0];
    let (v0, _) = env.boundary(first.t, first.coef[0].tau)?;
    let mut out = vec![MapLevel {
        t: first.t,
        z: first.z.clone(),
        theta: vec![v0[0]],
        xi: vec![v0[1]],
        eta: vec![v0[2]],
        jac: vec![jacobian(&first.coef[0], first.x[0], first.y[0])],
    }];
    let mut prev_vals = vec![v0];
    let mut prev_rates = vec![inversion_rates(first.t, &first.coef[0], first.y[0], v0[0])];
    for k in 1..field.levels.len() {
        let (pl, l) = (&field.levels[k - 1], &field.levels[k]);
        let (tk, tn) = (pl.t, l.t);
        let rows = (0..l.len())
            .into_par_iter()
            .map(|j| -> Result<([f64; 3], [f64; 3]), InversionError> {
                let co = &l.coef[j];
                let (start, f0, hs) = match l.feet[j] {
                    Foot::Data => {
                        let (v, _) = env.boundary(tn, co.tau)?;
                        return Ok((v, inversion_rates(tn, co, l.y[j], v[0])));
                    }
                    Foot::Interior(zd) => (lerp_rows(&pl.z, &prev_vals, zd), lerp_rows(&pl.z, &prev_rates, zd), tk - tn),
                    Foot::Boundary(ts) => {
                        let (v, f) = env.boundary(ts, co.tau)?;
                        (v, f, ts - tn)
                    }
                };
                let pred = [0, 1, 2].map(|i| start[i] - hs * f0[i]);
                let fp = inversion_rates(tn, co, l.y[j], pred[0]);
                let v = [0, 1, 2].map(|i| start[i] - 0.5 * hs * (f0[i] + fp[i]));
                Ok((v, inversion_rates(tn, co, l.y[j], v[0])))
            })
            .collect::<Vec<_>>()
            .into_iter()
            .collect::<Result<Vec<_>, _>>()?;
        prev_vals = rows.iter().map(|r| r.0).collect();
        prev_rates = rows.iter().map(|r| r.1).collect();
        out.push(MapLevel {
            t: tn,
            z: l.z.clone(),
            theta: prev_vals.iter().map(|v| v[0]).collect(),
            xi: prev_vals.iter().map(|v| v[1]).collect(),
            eta: prev_vals.iter().map(|v| v[2]).collect(),
            jac: (0..l.len()).map(|j| jacobian(&l.coef[j], l.x[j], l.y[j])).collect(),
        });
    }
    // last step onto t = 0, where Λ̃₊ and the rates vanish
    let pl = field.last();
    let s = &field.sonic;
    let h = pl.t;
    let lp = pl.lam_plus();
    let zr = *pl.z.last().unwrap();
    let n = s.z.len();
    let mut sonic_vals = Vec::with_capacity(n);
    for (j, &zq) in s.z.iter().enumerate() {
        let v = if j == n - 1 {
            env.boundary(0.0, s.tau[j])?.0
        } else {
            let z1 = zq + 0.5 * h * linear(&pl.z, &lp, zq);
            let zd = zq + 0.5 * h * linear(&pl.z, &lp, z1);
            if zd > zr {
                // the characteristic through (zq, 0) meets the data curve
                let (mut lo, mut hi) = (0.0, h);
                for _ in 0..60 {
                    let m = 0.5 * (lo + hi);
                    if zq + 0.5 * trace.char_speeds(m).0 * m > trace.z_tilde(m) {
                        hi = m;
                    } else {
                        lo = m;
                    }
                }
                let ts = 0.5 * (lo + hi);
                let (b, f) = env.boundary(ts, s.tau[j])?;
                [0, 1, 2].map(|i| b[i] - 0.5 * ts * f[i])
            } else {
                let v0 = lerp_rows(&pl.z, &prev_vals, zd);
                let f0 = lerp_rows(&pl.z, &prev_rates, zd);
                [0, 1, 2].map(|i| v0[i] - 0.5 * h * f0[i])
            }
        };
        sonic_vals.push(v);
    }
    out.push(MapLevel {
        t: 0.0,
        z: s.z.clone(),
        theta: sonic_vals.iter().map(|v| v[0]).collect(),
        xi: sonic_vals.iter().map(|v| v[1]).collect(),
        eta: sonic_vals.iter().map(|v| v[2]).collect(),
        jac: (0..n).map(|j| s.c[j] * (1.0 + s.kappa[j]) / s.xy[j]).collect(),
    });
    Ok(InversionMap { levels: out })
}

/// Which part of the patch boundary a node lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tag {
    #[serde(rename = "LM")]
    Lm,
    #[serde(rename = "MN")]
    Mn,
    #[serde(rename = "NO")]
    No,
    #[serde(rename = "interior")]
    Interior,
}

impl Tag {
    pub fn as_str(&self) -> &'static str {
        match self {
            Tag::Lm => "LM",
            Tag::Mn => "MN",
            Tag::No => "NO",
            Tag::Interior => "interior",
        }
    }
}

/// The closing characteristic NO through N′ = (z̄(0), 0).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoCurve {
    /// t at which NO meets the data curve (the image of O).
    pub delta_bar: f64,
    /// Dense samples (t, z) from N′ up to O.
    pub t: Vec<f64>,
    pub z: Vec<f64>,
    /// Distance of the downward re-integration from N′, in units of Δz.
    pub landing_error: f64,
    /// Physical image at the level values t ≤ δ̄ (ascending in t).
    pub level_t: Vec<f64>,
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    /// max |sin(segment angle − α)| along the physical polyline.
    pub slope_residual_max: f64,
    pub slope_residual_rms: f64,
}

impl NoCurve {
    pub fn z_at(&self, t: f64) -> f64 {
        linear(&self.t, &self.z, t)
    }
}

/// Λ̃₋/t² sampled on the levels, in ascending t, for interpolation.
struct ReducedSpeed {
    t: Vec<f64>,
    z: Vec<Vec<f64>>,
    r: Vec<Vec<f64>>,
}

impl ReducedSpeed {
    fn new(field: &HodographField) -> Self {
        let mut t = vec![0.0];
        let mut z = vec![field.sonic.z.clone()];
        let mut r = vec![field.sonic.lam_minus_reduced.clone()];
        for l in field.levels.iter().rev() {
            t.push(l.t);
            z.push(l.z.clone());
            r.push(l.coef.iter().map(|c| c.lam_minus / (l.t * l.t)).collect());
        }
        Self { t, z, r }
    }

    fn speed(&self, zq: f64, tq: f64) -> f64 {
        let i = locate(&self.t, tq);
        let w = ((tq - self.t[i]) / (self.t[i + 1] - self.t[i])).clamp(0.0, 1.0);
        let a = linear(&self.z[i], &self.r[i], zq);
        let b = linear(&self.z[i + 1], &self.r[i + 1], zq);
        tq * tq * (a + w * (b - a))
    }
}

fn rk4(rs: &ReducedSpeed, z: f64, t: f64, h: f64) -> f64 {
    let k1 = rs.speed(z, t);
    let k2 = rs.speed(z + 0.5 * h * k1, t + 0.5 * h);
    let k3 = rs.speed(z + 0.5 * h * k2, t + 0.5 * h);
    let k4 = rs.speed(z + h * k3, t + h);
    z + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
}

/// Substeps of the NO integration per Δt.
pub const NO_SUBSTEPS: usize = 8;

/// Integrates dz/dt = Λ̃₋ upwards from N′ until the curve meets z̃(t),
/// then back down from the meeting point to check the landing on N′.
pub fn characteristic_no(
    field: &HodographField,
    map: &InversionMap,
    trace: &BoundaryTrace,
) -> Result<NoCurve, InversionError> {
    let rs = ReducedSpeed::new(field);
    let h = field.grid.dt / NO_SUBSTEPS as f64;
    let top = field.levels[0].t;
    let mut ts = vec![0.0];
    let mut zs = vec![field.domain.z_bar0()];
    let mut i = 0usize;
    let delta_bar = loop {
        let (t, z) = (i as f64 * h, zs[i]);
        let t1 = ((i + 1) as f64 * h).min(top);
        if t1 <= t {
            return Err(InversionError::NoNotClosed(top));
        }
        let z1 = rk4(&rs, z, t, t1 - t);
        if z1 >= trace.z_tilde(t1) {
            let (mut lo, mut hi) = (0.0, t1 - t);
            for _ in 0..60 {
                let m = 0.5 * (lo + hi);
                if rk4(&rs, z, t, m) >= trace.z_tilde(t + m) {
                    hi = m;
                } else {
                    lo = m;
                }
            }
            let tb = t + hi;
            ts.push(tb);
            zs.push(trace.z_tilde(tb));
            break tb;
        }
        ts.push(t1);
        zs.push(z1);
        i += 1;
    };
    // downward check from O
    let mut z = *zs.last().unwrap();
    let mut t = delta_bar;
    while t > 0.0 {
        let tn = ((t / h).ceil() - 1.0).max(0.0) * h;
        z = rk4(&rs, z, t, tn - t);
        t = tn;
    }
    let landing_error = (z - field.domain.z_bar0()).abs() / field.grid.dz;

    let curve = NoCurve {
        delta_bar,
        t: ts,
        z: zs,
        landing_error,
        level_t: vec![],
        xi: vec![],
        eta: vec![],
        slope_residual_max: 0.0,
        slope_residual_rms: 0.0,
    };
    Ok(with_physical_image(curve, map, trace))
}

fn with_physical_image(mut no: NoCurve, map: &InversionMap, trace: &BoundaryTrace) -> NoCurve {
    let mut pts: Vec<(f64, f64, f64, f64)> = Vec::new();
    for l in map.levels.iter().rev() {
        if l.t > no.delta_bar {
            continue;
        }
        let zq = no.z_at(l.t);
        pts.push((l.t, linear(&l.z, &l.xi, zq), linear(&l.z, &l.eta, zq), linear(&l.z, &l.theta, zq)));
    }
    let (th, xi, eta) = trace.physical(no.delta_bar);
    pts.push((no.delta_bar, xi, eta, th));
    let mut res = Vec::new();
    for w in pts.windows(2) {
        let (a, b) = (w[0], w[1]);
        let seg = (b.2 - a.2).atan2(b.1 - a.1);
        let tm = 0.5 * (a.0 + b.0);
        let alpha = 0.5 * (a.3 + b.3) + tm.acos();
        res.push((seg - alpha).sin().abs());
    }
    no.slope_residual_max = res.iter().copied().fold(0.0, f64::max);
    no.slope_residual_rms = (res.iter().map(|r| r * r).sum::<f64>() / res.len().max(1) as f64).sqrt();
    no.level_t = pts.iter().map(|p| p.0).collect();
    no.xi = pts.iter().map(|p| p.1).collect();
    no.eta = pts.iter().map(|p| p.2).collect();
    no
}

/// One reconstructed node of the patch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PatchNode {
    pub xi: f64,
    pub eta: f64,
    pub u: f64,
    pub v: f64,
    pub tau: f64,
    pub c: f64,
    pub theta: f64,
    pub wbar: f64,
    pub tag: Tag,
    pub t: f64,
    pub z: f64,
    /// Relative position between NO (0) and the data curve (1).
    pub s: f64,
    pub x_tilde: f64,
    pub y_tilde: f64,
    pub level: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatchSolution {
    pub nodes: Vec<PatchNode>,
    pub phi_m: f64,
    pub delta_bar: f64,
}

impl PatchSolution {
    /// (U²+V²)/2 + E(τ) + φ at every node, φ = z + φ_M.
    pub fn bernoulli_residuals(&self, gas: &impl Thermo) -> Vec<f64> {
        self.nodes
            .iter()
            .map(|n| {
                let (uu, vv) = (n.u - n.xi, n.v - n.eta);
                let scale = 0.5 * (uu * uu + vv * vv);
                (scale + gas.energy(n.tau) + n.z + self.phi_m) / scale
            })
            .collect()
    }
}

/// Builds the patch between NO and the data curve for t ≤ δ̄, inserting
/// the NO point on every level.
pub fn reconstruct(
    map: &InversionMap,
    field: &HodographField,
    no: &NoCurve,
    gas: &impl Thermo,
    window: &TauWindow,
) -> Result<PatchSolution, InversionError> {
    let phi_m = field.domain.phi_m;
    let mut nodes = Vec::new();
    let nl = map.levels.len();
    for (li, ml) in map.levels.iter().enumerate() {
        let t = ml.t;
        if t > no.delta_bar {
            continue;
        }
        let sonic = li == nl - 1;
        let (xt, yt, tau): (Vec<f64>, Vec<f64>, Vec<f64>) = if sonic {
            (field.sonic.xy.clone(), field.sonic.xy.clone(), field.sonic.tau.clone())
        } else {
            let l = &field.levels[li];
            (l.x.clone(), l.y.clone(), l.tau())
        };
        let z_no = no.z_at(t);
        let zr = *ml.z.last().unwrap();
        let wbar = (1.0 - t * t).sqrt();
        let make = |z: f64, tau: f64, theta: f64, xi: f64, eta: f64, xt: f64, yt: f64, tag: Tag| {
            let c = gas.sound_speed(tau);
            PatchNode {
                xi,
                eta,
                u: xi + c * theta.cos() / wbar,
                v: eta + c * theta.sin() / wbar,
                tau,
                c,
                theta,
                wbar,
                tag,
                t,
                z,
                s: ((z - z_no) / (zr - z_no)).clamp(0.0, 1.0),
                x_tilde: xt,
                y_tilde: yt,
                level: li,
            }
        };
        let tag_of = |j: usize| {
            if sonic {
                Tag::Mn
            } else if j == ml.z.len() - 1 {
                Tag::Lm
            } else {
                Tag::Interior
            }
        };
        let first = ml.z.iter().position(|&z| z >= z_no - 1e-12 * z_no.abs()).unwrap_or(ml.z.len());
        let on_node = first < ml.z.len() && (ml.z[first] - z_no).abs() <= 1e-9 * field.grid.dz;
        if !sonic && !on_node {
            let tau_no = gas
                .solve_tau(z_no, t, phi_m, window, linear(&ml.z, &tau, z_no))
                .map_err(|source| InversionError::Closure { z: z_no, t, source })?;
            let g = |v: &[f64]| linear(&ml.z, v, z_no);
            nodes.push(make(z_no, tau_no, g(&ml.theta), g(&ml.xi), g(&ml.eta), g(&xt), g(&yt), Tag::No));
        }
        for j in first..ml.z.len() {
            let tag = if !sonic && on_node && j == first { Tag::No } else { tag_of(j) };
            nodes.push(make(ml.z[j], tau[j], ml.theta[j], ml.xi[j], ml.eta[j], xt[j], yt[j], tag));
        }
    }
    Ok(PatchSolution { nodes, phi_m, delta_bar: no.delta_bar })
}

/// Injectivity diagnostics of the node map (z, t) → (ξ, η).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InjectivityReport {
    /// Pairs of non-adjacent nodes closer than the tolerance.
    pub collisions: usize,
    pub tolerance: f64,
    /// Smallest separation between nodes of different levels.
    pub min_cross_level_distance: f64,
    /// Signs of the discrete Jacobian ∂(ξ,η)/∂(z,t) over the field nodes.
    pub orientation_negative: usize,
    pub orientation_positive: usize,
}

impl InjectivityReport {
    pub fn injective(&self) -> bool {
        self.collisions == 0 && (self.orientation_negative == 0 || self.orientation_positive == 0)
    }
}

/// Spatial-hash collision test on the patch plus the sign of the discrete
/// Jacobian of the map between consecutive levels.
pub fn check_injectivity(patch: &PatchSolution, map: &InversionMap, tol: f64) -> InjectivityReport {
    let key = |x: f64, y: f64| ((x / tol).floor() as i64, (y / tol).floor() as i64);
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, n) in patch.nodes.iter().enumerate() {
        grid.entry(key(n.xi, n.eta)).or_default().push(i);
    }
    let mut collisions = 0;
    for (i, n) in patch.nodes.iter().enumerate() {
        let (kx, ky) = key(n.xi, n.eta);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(list) = grid.get(&(kx + dx, ky + dy)) {
                    for &j in list {
                        if j <= i {
                            continue;
                        }
                        let m = &patch.nodes[j];
                        let adjacent = m.level == n.level && j == i + 1;
                        if !adjacent && (m.xi - n.xi).hypot(m.eta - n.eta) < tol {
                            collisions += 1;
                        }
                    }
                }
            }
        }
    }
    // nearest node on the next level, sorted-by-ξ sweep would be overkill here
    let mut min_cross = f64::INFINITY;
    let by_level = {
        let mut m: Vec<Vec<&PatchNode>> = Vec::new();
        for n in &patch.nodes {
            if m.len() <= n.level {
                m.resize(n.level + 1, Vec::new());
            }
            m[n.level].push(n);
        }
        m
    };
    for w in by_level.windows(2) {
        for a in &w[0] {
            for b in &w[1] {
                min_cross = min_cross.min((a.xi - b.xi).hypot(a.eta - b.eta));
            }
        }
    }
    let (mut neg, mut pos) = (0, 0);
    for w in map.levels.windows(2) {
        let (hi, lo) = (&w[0], &w[1]);
        if hi.z.len() < 2 {
            continue;
        }
        let dt = hi.t - lo.t;
        for j in 0..lo.z.len().saturating_sub(1) {
            let zq = lo.z[j];
            if zq < hi.z[0] || zq > *hi.z.last().unwrap() {
                continue;
            }
            let dz = lo.z[j + 1] - lo.z[j];
            let xi_z = (lo.xi[j + 1] - lo.xi[j]) / dz;
            let eta_z = (lo.eta[j + 1] - lo.eta[j]) / dz;
            let xi_t = (linear(&hi.z, &hi.xi, zq) - lo.xi[j]) / dt;
            let eta_t = (linear(&hi.z, &hi.eta, zq) - lo.eta[j]) / dt;
            let det = xi_z * eta_t - xi_t * eta_z;
            if det < 0.0 {
                neg += 1;
            } else {
                pos += 1;
            }
        }
    }
    InjectivityReport {
        collisions,
        tolerance: tol,
        min_cross_level_distance: min_cross,
        orientation_negative: neg,
        orientation_positive: pos,
    }
}

/// The sonic curve MN in the self-similar plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SonicCurve {
    /// Polyline from M towards N.
    pub xi: Vec<f64>,
    pub eta: Vec<f64>,
    pub tangent_angle: Vec<f64>,
    /// Range of |∇ω̄|² along the curve.
    pub grad_sq_min: f64,
    pub grad_sq_max: f64,
    pub holder_fit: Result<HolderFit, HolderError>,
}

/// Minimum number of sonic nodes for the tangent-angle fit.
pub const MIN_SONIC_NODES: usize = 8;

/// Orders the MN nodes from M towards N and fits the Hölder exponent of
/// the tangent angle against arclength.
pub fn extract_sonic_curve(patch: &PatchSolution, field: &HodographField, seed: u64) -> SonicCurve {
    let mut mn: Vec<&PatchNode> = patch.nodes.iter().filter(|n| n.tag == Tag::Mn).collect();
    mn.sort_by(|a, b| b.z.total_cmp(&a.z));
    let xi: Vec<f64> = mn.iter().map(|n| n.xi).collect();
    let eta: Vec<f64> = mn.iter().map(|n| n.eta).collect();
    let n = xi.len();
    let tangent_angle: Vec<f64> = (0..n)
        .map(|i| {
            let (a, b) = (i.saturating_sub(1), (i + 1).min(n.saturating_sub(1)));
            (eta[b] - eta[a]).atan2(xi[b] - xi[a])
        })
        .collect();
    let s = &field.sonic;
    let grad: Vec<f64> = (0..s.z.len())
        .map(|j| {
            let d = 1.0 + s.kappa[j];
            let w = -s.w[j] / (s.xy[j] * s.xy[j]);
            (d * w + 1.0 / s.c[j]).powi(2) + (d / s.xy[j]).powi(2)
        })
        .collect();
    let mut arc = vec![0.0];
    for i in 1..n {
        arc.push(arc[i - 1] + (xi[i] - xi[i - 1]).hypot(eta[i] - eta[i - 1]));
    }
    let holder_fit = if n < MIN_SONIC_NODES {
        Err(HolderError::TooFewSamples(n))
    } else {
        holder_estimate(&arc, &tangent_angle, seed)
    };
    SonicCurve {
        xi,
        eta,
        tangent_angle,
        grad_sq_min: grad.iter().copied().fold(f64::INFINITY, f64::min),
        grad_sq_max: grad.iter().copied().fold(0.0, f64::max),
        holder_fit,
    }
}

/// Largest |ξ(z, Δt) − ξ(z, 0)| over the sonic nodes, the quantity whose
/// Δt-scaling reflects the O(t) integrands near the sonic line.
pub fn sonic_step_size(map: &InversionMap) -> f64 {
    let s = map.sonic();
    let l = &map.levels[map.levels.len() - 2];
    s.z.iter()
        .zip(&s.xi)
        .filter(|(z, _)| **z >= l.z[0] && **z <= *l.z.last().unwrap())
        .map(|(&z, &x)| (linear(&l.z, &l.xi, z) - x).abs())
        .fold(0.0, f64::max)
}
