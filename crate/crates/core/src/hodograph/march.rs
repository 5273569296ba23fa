//! Level marching from t = δ down to t = Δt along both characteristic
//! families, with a Heun predictor–corrector and linear footpoint
//! interpolation.
//!
//! Levels are t = δ followed by every kΔt < δ, so the first step is
//! partial and coarse levels are a subset of fine ones under Δt-halving.
//! On each level the nodes are the lattice −jΔz strictly inside Ω plus the
//! two exact edges z̄(t) and z̃(t), ordered by increasing z. The right-most
//! node always carries boundary data.
//!
//! X̃ and W̃ travel along Λ̃₊, Ỹ along Λ̃₋. After the corrector the closure
//! X̃ − Ỹ = 2tW̃ is restored by resetting W̃.

use super::coeffs::{coefficients, Coefficients};
use super::domain::DomainOmega;
use crate::boundary::BoundaryTrace;
use crate::gas::{GasError, TauWindow, Thermo};
use crate::interp::linear;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarchError {
    #[error("closure failed at z = {z}, t = {t}: {source}")]
    Closure { z: f64, t: f64, source: GasError },
    #[error("monitor {name} violated at z = {z}, t = {t}: value {value}, limit {limit}")]
    Monitor { name: &'static str, t: f64, z: f64, value: f64, limit: f64 },
    #[error("grid too coarse: {0}")]
    TooCoarse(String),
    #[error("non-finite state at z = {z}, t = {t}")]
    NonFinite { z: f64, t: f64 },
}

impl MarchError {
    /// True for monitor violations, false for numerical failures.
    pub fn is_monitor(&self) -> bool {
        matches!(self, MarchError::Monitor { .. })
    }
}

/// Step sizes of the level grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub dt: f64,
    pub dz: f64,
}

impl GridSpec {
    /// Δz = |z̄(0)|·Δt/(ρδ): about ρ lattice cells per Δt of height at the
    /// base of Ω, and Δz halves with Δt.
    pub fn auto(dom: &DomainOmega, dt: f64, z_per_t: f64) -> Self {
        Self { dt, dz: dom.z_bar0().abs() * dt / (z_per_t * dom.delta) }
    }
}

/// Abort thresholds checked while marching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarchTolerances {
    pub w_tilde_max: f64,
    /// Allowed overshoot of a footpoint past the left edge, in units of Δz.
    pub containment_slack: f64,
}

impl Default for MarchTolerances {
    fn default() -> Self {
        Self { w_tilde_max: 1e3, containment_slack: 1e-6 }
    }
}

/// Where the Λ̃₊ characteristic through a node was traced back to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Foot {
    /// The node carries boundary data.
    Data,
    /// Footpoint on the previous level.
    Interior(f64),
    /// The characteristic crossed the boundary curve at this t.
    Boundary(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    pub t: f64,
    pub z: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub w: Vec<f64>,
    pub coef: Vec<Coefficients>,
    /// (dX̃, dỸ, dW̃)/dt along the characteristics, used as footpoint data.
    pub rates: Vec<[f64; 3]>,
    /// Corrector feet of the Λ̃₊ family, reused by the inversion.
    pub feet: Vec<Foot>,
}

impl Level {
    pub fn len(&self) -> usize {
        self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.z.is_empty()
    }

    pub fn tau(&self) -> Vec<f64> {
        self.coef.iter().map(|c| c.tau).collect()
    }

    pub fn c(&self) -> Vec<f64> {
        self.coef.iter().map(|c| c.c).collect()
    }

    pub fn lam_plus(&self) -> Vec<f64> {
        self.coef.iter().map(|c| c.lam_plus).collect()
    }

    pub fn lam_minus(&self) -> Vec<f64> {
        self.coef.iter().map(|c| c.lam_minus).collect()
    }
}

/// Values on the sonic line t = 0, extrapolated linearly in t from the
/// two lowest levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SonicTrace {
    pub z: Vec<f64>,
    /// Extrapolated X̃ and Ỹ before averaging.
    pub x_ext: Vec<f64>,
    pub y_ext: Vec<f64>,
    /// Common value X̃ = Ỹ.
    pub xy: Vec<f64>,
    pub w: Vec<f64>,
    pub tau: Vec<f64>,
    pub c: Vec<f64>,
    pub kappa: Vec<f64>,
    /// Λ̃₋/t² at t = 0, i.e. −cμ²X̃.
    pub lam_minus_reduced: Vec<f64>,
}

/// Extremes observed while marching.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MarchMonitors {
    pub min_x_tilde: f64,
    pub min_y_tilde: f64,
    pub min_ep: f64,
    pub min_em: f64,
    pub max_speed_ratio: f64,
    /// Smallest distance of a Λ̃₋ footpoint right of the left edge, in Δz.
    pub min_containment: f64,
    pub sup_w_tilde: f64,
    pub max_closure: f64,
    pub boundary_crossings: usize,
}

#[derive(Debug, Clone)]
pub struct HodographField {
    pub levels: Vec<Level>,
    pub sonic: SonicTrace,
    pub grid: GridSpec,
    pub domain: DomainOmega,
    pub monitors: MarchMonitors,
}

impl HodographField {
    pub fn node_count(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }

    pub fn last(&self) -> &Level {
        self.levels.last().unwrap()
    }
}

/// Level values t = δ, NΔt, …, Δt.
pub fn level_times(delta: f64, dt: f64) -> Vec<f64> {
    let n = (delta / dt * (1.0 - 1e-12)).floor() as usize;
    let mut v = vec![delta];
    for k in (1..=n).rev() {
        let t = k as f64 * dt;
        if delta - t >= 1e-3 * dt {
            v.push(t);
        }
    }
    v
}

/// Lattice nodes of level t, ascending in z.
pub fn level_nodes(zl: f64, zr: f64, dz: f64) -> Vec<f64> {
    if zr - zl <= 1e-12 * zr.abs().max(dz) {
        return vec![zr];
    }
    let gap = 1e-3 * dz;
    let j_hi = (-zl / dz).floor() as i64;
    let j_lo = (-zr / dz).ceil() as i64;
    let mut z = vec![zl];
    for j in (j_lo.max(0)..=j_hi).rev() {
        let v = -(j as f64) * dz;
        if v > zl + gap && v < zr - gap {
            z.push(v);
        }
    }
    z.push(zr);
    z
}

/// ∂_z on a non-uniform ascending grid: second-order central differences
/// inside, one-sided at the ends.
pub fn z_gradient(z: &[f64], v: &[f64]) -> Vec<f64> {
    let n = z.len();
    let mut g = vec![0.0; n];
    if n < 3 {
        return g;
    }
    g[0] = (v[1] - v[0]) / (z[1] - z[0]);
    g[n - 1] = (v[n - 1] - v[n - 2]) / (z[n - 1] - z[n - 2]);
    for i in 1..n - 1 {
        let hl = z[i] - z[i - 1];
        let hr = z[i + 1] - z[i];
        g[i] = (hl * hl * v[i + 1] - hr * hr * v[i - 1] + (hr * hr - hl * hl) * v[i]) / (hl * hr * (hl + hr));
    }
    g
}

struct Ctx<'a, G: Thermo> {
    trace: &'a BoundaryTrace,
    dom: &'a DomainOmega,
    gas: &'a G,
    window: &'a TauWindow,
}

/// Boundary state, coefficients and rates at a point of the data curve.
struct BoundaryState {
    u: [f64; 3],
    rates: [f64; 3],
    coef: Coefficients,
}

impl<G: Thermo> Ctx<'_, G> {
    fn tau(&self, z: f64, t: f64, guess: f64) -> Result<f64, MarchError> {
        self.gas
            .solve_tau(z, t, self.dom.phi_m, self.window, guess)
            .map_err(|source| MarchError::Closure { z, t, source })
    }

    fn boundary_state(&self, t: f64, guess: f64) -> Result<BoundaryState, MarchError> {
        let p = self.trace.at(t);
        let tau = self.tau(p.z, t, guess)?;
        let coef = coefficients(t, tau, self.gas, p.x_tilde, p.y_tilde, p.w_tilde);
        let rates = coef.rates(t, p.x_tilde, p.y_tilde, p.w_tilde, self.trace.y_tilde_z(t));
        Ok(BoundaryState { u: [p.x_tilde, p.y_tilde, p.w_tilde], rates, coef })
    }

    /// t* in (t_lo, t_hi) where the characteristic through (z_n, t_lo)
    /// meets the boundary curve. The slope over [t_lo, t*] is the boundary
    /// speed at t* (predictor) or its mean with `lam_new` (corrector), so
    /// that a partial step uses the same quadrature as a full one.
    fn crossing(&self, z_n: f64, plus: bool, lam_new: Option<f64>, t_lo: f64, t_hi: f64) -> f64 {
        let slope = |m: f64| {
            let (p, q) = self.trace.char_speeds(m);
            let lb = if plus { p } else { q };
            lam_new.map_or(lb, |ln| 0.5 * (lb + ln))
        };
        let (mut lo, mut hi) = (t_lo, t_hi);
        for _ in 0..60 {
            let m = 0.5 * (lo + hi);
            if z_n + slope(m) * (m - t_lo) > self.trace.z_tilde(m) {
                hi = m;
            } else {
                lo = m;
            }
        }
        0.5 * (lo + hi)
    }
}

/// Marches the hodograph system over Ω.
pub fn march(
    trace: &BoundaryTrace,
    dom: &DomainOmega,
    gas: &impl Thermo,
    window: &TauWindow,
    grid: GridSpec,
    tol: MarchTolerances,
) -> Result<HodographField, MarchError> {
    let ctx = Ctx { trace, dom, gas, window };
    let times = level_times(dom.delta, grid.dt);
    if times.len() < 3 {
        return Err(MarchError::TooCoarse(format!(
            "dt = {} leaves {} levels below delta = {}",
            grid.dt,
            times.len(),
            dom.delta
        )));
    }
    if !(grid.dz > 0.0 && grid.dz.is_finite()) {
        return Err(MarchError::TooCoarse(format!("dz = {}", grid.dz)));
    }
    let mut mon = MarchMonitors {
        min_x_tilde: f64::INFINITY,
        min_y_tilde: f64::INFINITY,
        min_ep: f64::INFINITY,
        min_em: f64::INFINITY,
        max_speed_ratio: 0.0,
        min_containment: f64::INFINITY,
        sup_w_tilde: 0.0,
        max_closure: 0.0,
        boundary_crossings: 0,
    };

    let t0 = times[0];
    let top = ctx.boundary_state(t0, trace.spec.tau_m)?;
    let first = Level {
        t: t0,
        z: vec![trace.z_tilde(t0)],
        x: vec![top.u[0]],
        y: vec![top.u[1]],
        w: vec![top.u[2]],
        coef: vec![top.coef],
        rates: vec![top.rates],
        feet: vec![Foot::Data],
    };
    accept(&first, &tol, dom, &mut mon)?;
    let mut levels = vec![first];
    for &tn in &times[1..] {
        let next = step(&ctx, levels.last().unwrap(), tn, grid.dz, &tol, &mut mon)?;
        accept(&next, &tol, dom, &mut mon)?;
        levels.push(next);
    }
    let sonic = sonic_trace(&ctx, &levels, grid.dz)?;
    Ok(HodographField { levels, sonic, grid, domain: *dom, monitors: mon })
}

/// Checks positivity, denominators, the speed bound and the W̃ bound on
/// an accepted level.
fn accept(l: &Level, tol: &MarchTolerances, dom: &DomainOmega, mon: &mut MarchMonitors) -> Result<(), MarchError> {
    let t = l.t;
    for i in 0..l.len() {
        let (x, y, w, co, z) = (l.x[i], l.y[i], l.w[i], &l.coef[i], l.z[i]);
        if !(x.is_finite() && y.is_finite() && w.is_finite()) {
            return Err(MarchError::NonFinite { z, t });
        }
        let fail = |name, value, limit| Err(MarchError::Monitor { name, t, z, value, limit });
        if !(x > 0.0) {
            return fail("x_tilde_positive", x, 0.0);
        }
        if !(y > 0.0) {
            return fail("y_tilde_positive", y, 0.0);
        }
        if !(co.ep > 0.0) {
            return fail("denominator_plus", co.ep, 0.0);
        }
        if !(co.em > 0.0) {
            return fail("denominator_minus", co.em, 0.0);
        }
        let ratio = co.lam_plus.abs().max(co.lam_minus.abs()) / (t * t);
        if ratio > dom.m_tilde {
            return fail("speed_bound", ratio, dom.m_tilde);
        }
        if w.abs() > tol.w_tilde_max {
            return fail("w_tilde_bound", w.abs(), tol.w_tilde_max);
        }
        mon.min_x_tilde = mon.min_x_tilde.min(x);
        mon.min_y_tilde = mon.min_y_tilde.min(y);
        mon.min_ep = mon.min_ep.min(co.ep);
        mon.min_em = mon.min_em.min(co.em);
        mon.max_speed_ratio = mon.max_speed_ratio.max(ratio);
        mon.sup_w_tilde = mon.sup_w_tilde.max(w.abs());
        mon.max_closure = mon.max_closure.max((x - y - 2.0 * t * w).abs());
    }
    Ok(())
}

/// One traced family at one node: the value after the step and the foot.
struct Traced {
    u: [f64; 3],
    foot: Foot,
    foot_z: f64,
}

#[allow(clippy::too_many_arguments)]
fn trace_node<G: Thermo>(
    ctx: &Ctx<'_, G>,
    prev: &Level,
    lam_prev: &[f64],
    plus: bool,
    zn: f64,
    tn: f64,
    lam_new: Option<f64>,
    rates_new: Option<[f64; 3]>,
    guess: f64,
) -> Result<Traced, MarchError> {
    let h = prev.t - tn;
    let lam_at = |z: f64| linear(&prev.z, lam_prev, z);
    let lam = match lam_new {
        None => {
            let z0 = zn + h * lam_at(zn);
            lam_at(z0)
        }
        Some(ln) => {
            let z1 = zn + 0.5 * h * (lam_at(zn) + ln);
            0.5 * (lam_at(z1) + ln)
        }
    };
    let zd = zn + h * lam;
    let zr = *prev.z.last().unwrap();
    let combine = |u0: f64, f0: f64, hs: f64, k: usize| match rates_new {
        None => u0 - hs * f0,
        Some(fnew) => u0 - 0.5 * hs * (f0 + fnew[k]),
    };
    if zd > zr {
        let ts = ctx.crossing(zn, plus, lam_new, tn, prev.t);
        let b = ctx.boundary_state(ts, guess)?;
        let hs = ts - tn;
        let u = [0, 1, 2].map(|k| combine(b.u[k], b.rates[k], hs, k));
        Ok(Traced { u, foot: Foot::Boundary(ts), foot_z: zd })
    } else {
        let us = [&prev.x, &prev.y, &prev.w];
        let u = [0, 1, 2].map(|k| {
            let u0 = linear(&prev.z, us[k], zd);
            let f0 = interp_rate(prev, k, zd);
            combine(u0, f0, h, k)
        });
        Ok(Traced { u, foot: Foot::Interior(zd), foot_z: zd })
    }
}

fn interp_rate(prev: &Level, k: usize, z: f64) -> f64 {
    let n = prev.z.len();
    if n == 1 || z <= prev.z[0] {
        return prev.rates[0][k];
    }
    if z >= prev.z[n - 1] {
        return prev.rates[n - 1][k];
    }
    let i = crate::interp::locate(&prev.z, z);
    let w = (z - prev.z[i]) / (prev.z[i + 1] - prev.z[i]);
    prev.rates[i][k] + w * (prev.rates[i + 1][k] - prev.rates[i][k])
}

fn rates_on(z: &[f64], t: f64, x: &[f64], y: &[f64], w: &[f64], coef: &[Coefficients]) -> Vec<[f64; 3]> {
    let yz = z_gradient(z, y);
    (0..z.len()).map(|i| coef[i].rates(t, x[i], y[i], w[i], yz[i])).collect()
}

/// First error in node order, so the reported failure does not depend on
/// the parallel schedule.
fn first_err<T>(v: Vec<Result<T, MarchError>>) -> Result<Vec<T>, MarchError> {
    v.into_iter().collect()
}

fn step<G: Thermo>(
    ctx: &Ctx<'_, G>,
    prev: &Level,
    tn: f64,
    dz: f64,
    tol: &MarchTolerances,
    mon: &mut MarchMonitors,
) -> Result<Level, MarchError> {
    let zn = level_nodes(ctx.dom.z_bar(tn), ctx.trace.z_tilde(tn), dz);
    let n = zn.len();
    let nb = n - 1;
    let prev_tau = prev.tau();
    let lp = prev.lam_plus();
    let lm = prev.lam_minus();
    let bdry = ctx.boundary_state(tn, *prev_tau.last().unwrap())?;

    // closure state and predictor
    let stage1 = first_err(
        (0..n)
            .into_par_iter()
            .map(|j| {
                let guess = linear(&prev.z, &prev_tau, zn[j]);
                let tau = ctx.tau(zn[j], tn, guess)?;
                if j == nb {
                    return Ok((tau, bdry.u, 0.0));
                }
                let p = trace_node(ctx, prev, &lp, true, zn[j], tn, None, None, tau)?;
                let m = trace_node(ctx, prev, &lm, false, zn[j], tn, None, None, tau)?;
                Ok((tau, [p.u[0], m.u[1], p.u[2]], m.foot_z))
            })
            .collect(),
    )?;
    let tau: Vec<f64> = stage1.iter().map(|s| s.0).collect();
    let (xp, yp, wp) = split(stage1.iter().map(|s| s.1));
    let coef_p: Vec<Coefficients> = (0..n).map(|j| coefficients(tn, tau[j], ctx.gas, xp[j], yp[j], wp[j])).collect();
    let rates_p = rates_on(&zn, tn, &xp, &yp, &wp, &coef_p);

    // corrector
    let stage2 = first_err(
        (0..n)
            .into_par_iter()
            .map(|j| {
                if j == nb {
                    return Ok((bdry.u, Foot::Data, 0.0, false));
                }
                let p = trace_node(ctx, prev, &lp, true, zn[j], tn, Some(coef_p[j].lam_plus), Some(rates_p[j]), tau[j])?;
                let m = trace_node(ctx, prev, &lm, false, zn[j], tn, Some(coef_p[j].lam_minus), Some(rates_p[j]), tau[j])?;
                let crossed = matches!(p.foot, Foot::Boundary(_));
                Ok(([p.u[0], m.u[1], p.u[2]], p.foot, m.foot_z, crossed))
            })
            .collect(),
    )?;
    let (x, y, _) = split(stage2.iter().map(|s| s.0));
    let feet: Vec<Foot> = stage2.iter().map(|s| s.1).collect();
    // containment of the Λ̃₋ feet, predictor and corrector
    let left = prev.z[0];
    for j in 0..nb {
        for fz in [stage1[j].2, stage2[j].2] {
            let margin = (fz - left) / dz;
            mon.min_containment = mon.min_containment.min(margin);
            if margin < -tol.containment_slack {
                return Err(MarchError::Monitor {
                    name: "domain_containment",
                    t: tn,
                    z: zn[j],
                    value: margin,
                    limit: -tol.containment_slack,
                });
            }
        }
    }
    mon.boundary_crossings += stage2.iter().filter(|s| s.3).count();
    let w: Vec<f64> = (0..n).map(|j| (x[j] - y[j]) / (2.0 * tn)).collect();
    let coef: Vec<Coefficients> = (0..n).map(|j| coefficients(tn, tau[j], ctx.gas, x[j], y[j], w[j])).collect();
    let rates = rates_on(&zn, tn, &x, &y, &w, &coef);
    Ok(Level { t: tn, z: zn, x, y, w, coef, rates, feet })
}

fn split(it: impl Iterator<Item = [f64; 3]>) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let mut a = (Vec::new(), Vec::new(), Vec::new());
    for u in it {
        a.0.push(u[0]);
        a.1.push(u[1]);
        a.2.push(u[2]);
    }
    a
}

fn sonic_trace<G: Thermo>(ctx: &Ctx<'_, G>, levels: &[Level], dz: f64) -> Result<SonicTrace, MarchError> {
    let l1 = &levels[levels.len() - 1];
    let l2 = &levels[levels.len() - 2];
    let z = level_nodes(ctx.dom.z_bar0(), ctx.trace.z_tilde(0.0), dz);
    let n = z.len();
    let ext = |l1v: &[f64], l2v: &[f64], zq: f64| {
        let v1 = linear(&l1.z, l1v, zq);
        let v2 = linear(&l2.z, l2v, zq);
        v1 - l1.t * (v2 - v1) / (l2.t - l1.t)
    };
    let b = ctx.trace.at(0.0);
    let (mut x_ext, mut y_ext, mut xy, mut w) = (vec![], vec![], vec![], vec![]);
    for (j, &zq) in z.iter().enumerate() {
        let (xe, ye, we) = if j == n - 1 {
            (b.x_tilde, b.y_tilde, b.w_tilde)
        } else {
            (ext(&l1.x, &l2.x, zq), ext(&l1.y, &l2.y, zq), ext(&l1.w, &l2.w, zq))
        };
        x_ext.push(xe);
        y_ext.push(ye);
        xy.push(0.5 * (xe + ye));
        w.push(we);
    }
    let l1_tau = l1.tau();
    let tau = first_err(
        z.par_iter().map(|&zq| ctx.tau(zq, 0.0, linear(&l1.z, &l1_tau, zq))).collect(),
    )?;
    let c: Vec<f64> = tau.iter().map(|&t| ctx.gas.sound_speed(t)).collect();
    let kappa: Vec<f64> = tau.iter().map(|&t| ctx.gas.kappa(t)).collect();
    let lam_minus_reduced = (0..n).map(|j| -c[j] * xy[j] / (1.0 + kappa[j])).collect();
    Ok(SonicTrace { z, x_ext, y_ext, xy, w, tau, c, kappa, lam_minus_reduced })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_times_partial_first_step() {
        let v = level_times(0.0197, 1e-3);
        assert_eq!(v[0], 0.0197);
        assert_eq!(v[1], 0.019);
        assert_eq!(*v.last().unwrap(), 1e-3);
        assert_eq!(v.len(), 20);
        // coarse levels are a subset of fine levels
        let f = level_times(0.0197, 5e-4);
        for t in &v {
            assert!(f.iter().any(|s| (s - t).abs() < 1e-15));
        }
    }

    #[test]
    fn nodes_are_ascending_with_exact_edges() {
        let z = level_nodes(-0.0105, -0.0020, 1e-3);
        assert_eq!(z[0], -0.0105);
        assert_eq!(*z.last().unwrap(), -0.0020);
        assert!(z.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(z.len(), 2 + 8);
    }

    #[test]
    fn gradient_exact_for_quadratics() {
        let z = [0.0, 0.1, 0.35, 0.4, 0.9];
        let v: Vec<f64> = z.iter().map(|x| 3.0 * x * x - x).collect();
        let g = z_gradient(&z, &v);
        for i in 1..4 {
            assert!((g[i] - (6.0 * z[i] - 1.0)).abs() < 1e-12);
        }
    }
}
