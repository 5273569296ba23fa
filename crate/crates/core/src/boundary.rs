//! Compatible boundary data along the pseudo-streamline LM and its image
//! curve in the hodograph plane.
//!
//! The streamline is η = ψ(ξ) with quadratic ψ and affine ω̄̂, both fixed
//! by three scalars. ω̄̂ is treated as primary data; ĉ follows from the
//! compatibility ODE, integrated from the sonic point M at ξ₂ towards ξ₁.
//!
//! Nodes are uniform in t = √(1−ω̄̂²) rather than in ξ: the determinate
//! domain only reaches t ≈ 10⁻², which is a tiny sliver of ξ next to M.

use crate::gas::{GasError, TauWindow, Thermo};
use crate::interp::{hermite, InterpError, Pchip};
use crate::hodograph::char_speeds;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundaryError {
    #[error("invalid streamline: {0}")]
    InvalidSpec(String),
    #[error("specific volume left the admissible window at xi = {xi}: {source}")]
    TauExit { xi: f64, source: GasError },
    #[error("no positivity window: a_hat = {a}, b_hat = {b} next to the sonic point")]
    EmptyPositivityWindow { a: f64, b: f64 },
    #[error("boundary invariant violated: {0}")]
    Invariant(String),
    #[error(transparent)]
    Interp(#[from] InterpError),
}

/// Pseudo-streamline ψ(ξ) = η_M + s₁(ξ−ξ₂) + s₂(ξ−ξ₂)²/2 carrying
/// ω̄̂(ξ) = 1 − r(ξ₂−ξ), with the sonic state τ_M at M = (ξ₂, η_M).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamlineSpec {
    pub xi1: f64,
    pub xi2: f64,
    pub eta_m: f64,
    pub s1: f64,
    pub s2: f64,
    pub r: f64,
    pub tau_m: f64,
}

impl StreamlineSpec {
    pub fn validate(&self) -> Result<(), BoundaryError> {
        let bad = |m: String| Err(BoundaryError::InvalidSpec(m));
        if !(self.xi1 < self.xi2) {
            return bad(format!("need xi1 < xi2, got {} and {}", self.xi1, self.xi2));
        }
        if !(self.s1 < 0.0 && self.s2 < 0.0 && self.r > 0.0) {
            return bad(format!("need s1 < 0, s2 < 0, r > 0, got {}, {}, {}", self.s1, self.s2, self.r));
        }
        if !(self.wbar(self.xi1) > 0.0) {
            return bad(format!("wbar(xi1) = {} must be positive", self.wbar(self.xi1)));
        }
        // ψ′ is decreasing, so its maximum on [ξ₁, ξ₂] sits at ξ₁
        if !(self.dpsi(self.xi1) < 0.0) {
            return bad(format!("psi'(xi1) = {} must be negative", self.dpsi(self.xi1)));
        }
        if !(self.tau_m.is_finite() && self.tau_m > 0.0) {
            return bad(format!("tau_m = {} must be positive", self.tau_m));
        }
        Ok(())
    }

    pub fn psi(&self, xi: f64) -> f64 {
        let d = xi - self.xi2;
        self.eta_m + self.s1 * d + 0.5 * self.s2 * d * d
    }

    pub fn dpsi(&self, xi: f64) -> f64 {
        self.s1 + self.s2 * (xi - self.xi2)
    }

    pub fn d2psi(&self) -> f64 {
        self.s2
    }

    pub fn wbar(&self, xi: f64) -> f64 {
        1.0 - self.r * (self.xi2 - xi)
    }

    pub fn theta(&self, xi: f64) -> f64 {
        self.dpsi(xi).atan()
    }

    pub fn cos_theta(&self, xi: f64) -> f64 {
        1.0 / (1.0 + self.dpsi(xi).powi(2)).sqrt()
    }

    pub fn t_of_xi(&self, xi: f64) -> f64 {
        (1.0 - self.wbar(xi).powi(2)).max(0.0).sqrt()
    }

    pub fn xi_of_t(&self, t: f64) -> f64 {
        self.xi2 - (1.0 - (1.0 - t * t).sqrt()) / self.r
    }

    /// (ψ₀, ψ₁): lower and upper bounds of −ψ′, −ψ″ and ω̄̂′ on [ξ₁, ξ₂].
    /// All three are affine or constant, so the extremes sit at end points.
    pub fn psi_bounds(&self) -> (f64, f64) {
        let vals = [-self.dpsi(self.xi1), -self.dpsi(self.xi2), -self.s2, self.r];
        let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi)
    }
}

/// Right side of `cosθ̂ ĉ′ = (ĉ cosθ̂ ω̄̂′ − ω̄̂²)/(ω̄̂(1+κ(τ̂)ω̄̂²))`.
fn compat_rhs(spec: &StreamlineSpec, kappa: f64, xi: f64, c: f64) -> f64 {
    let w = spec.wbar(xi);
    let ct = spec.cos_theta(xi);
    (c * ct * spec.r - w * w) / (ct * w * (1.0 + kappa * w * w))
}

/// ĉ and τ̂ on a set of streamline nodes, with ĉ′ stored for Hermite
/// evaluation between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct CompatSolution {
    /// Nodes ordered from ξ₂ towards ξ₁.
    pub xi: Vec<f64>,
    pub c: Vec<f64>,
    pub tau: Vec<f64>,
    pub dc: Vec<f64>,
}

impl CompatSolution {
    /// ĉ at an arbitrary ξ inside the node range by cubic Hermite.
    pub fn c_at(&self, xi: f64) -> f64 {
        // nodes are decreasing in ξ
        let n = self.xi.len();
        let i = match self.xi.iter().position(|&x| x <= xi) {
            Some(0) => 0,
            Some(i) => i - 1,
            None => n - 2,
        }
        .min(n - 2);
        hermite(self.xi[i], self.xi[i + 1], self.c[i], self.c[i + 1], self.dc[i], self.dc[i + 1], xi)
    }
}

/// Nodes uniform in t on [0, t_top], mapped to ξ; the first node is ξ₂.
pub fn t_uniform_nodes(spec: &StreamlineSpec, t_top: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| spec.xi_of_t(t_top * i as f64 / n as f64)).collect()
}

/// Integrates the compatibility ODE with classical RK4 over the given
/// nodes, which must start at ξ₂ and move monotonically towards ξ₁.
/// τ̂ is recovered from ĉ at every stage by inverting c(τ) on the window.
pub fn solve_compatibility_on(
    spec: &StreamlineSpec,
    gas: &impl Thermo,
    window: &TauWindow,
    xi_nodes: &[f64],
) -> Result<CompatSolution, BoundaryError> {
    spec.validate()?;
    if xi_nodes.len() < 2 || xi_nodes[0] != spec.xi2 {
        return Err(BoundaryError::InvalidSpec("nodes must start at xi2".into()));
    }
    let tau_at = |xi: f64, c: f64, guess: f64| {
        gas.tau_from_c(c, window, guess).map_err(|source| BoundaryError::TauExit { xi, source })
    };
    let f = |xi: f64, c: f64, guess: f64| -> Result<(f64, f64), BoundaryError> {
        let tau = tau_at(xi, c, guess)?;
        Ok((compat_rhs(spec, gas.kappa(tau), xi, c), tau))
    };
    if !window.contains(spec.tau_m) {
        return Err(BoundaryError::TauExit {
            xi: spec.xi2,
            source: GasError::InvalidWindow(format!("tau_m = {} outside the window", spec.tau_m)),
        });
    }
    let n = xi_nodes.len();
    let mut c = Vec::with_capacity(n);
    let mut tau = Vec::with_capacity(n);
    let mut dc = Vec::with_capacity(n);
    let mut ci = gas.sound_speed(spec.tau_m);
    let mut ti = spec.tau_m;
    for i in 0..n {
        let x = xi_nodes[i];
        let (k1, t1) = f(x, ci, ti)?;
        c.push(ci);
        tau.push(t1);
        dc.push(k1);
        ti = t1;
        if i + 1 == n {
            break;
        }
        let h = xi_nodes[i + 1] - x;
        let (k2, _) = f(x + 0.5 * h, ci + 0.5 * h * k1, ti)?;
        let (k3, _) = f(x + 0.5 * h, ci + 0.5 * h * k2, ti)?;
        let (k4, _) = f(x + h, ci + h * k3, ti)?;
        ci += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0;
    }
    Ok(CompatSolution { xi: xi_nodes.to_vec(), c, tau, dc })
}

/// Compatibility ODE on `n` t-uniform intervals spanning [ξ₁, ξ₂].
pub fn solve_compatibility(
    spec: &StreamlineSpec,
    gas: &impl Thermo,
    window: &TauWindow,
    n: usize,
) -> Result<CompatSolution, BoundaryError> {
    spec.validate()?;
    let nodes = t_uniform_nodes(spec, spec.t_of_xi(spec.xi1), n.max(1));
    solve_compatibility_on(spec, gas, window, &nodes)
}

/// Pointwise boundary quantities at one streamline node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub xi: f64,
    pub theta: f64,
    pub wbar: f64,
    pub t: f64,
    pub c: f64,
    pub tau: f64,
    pub kappa: f64,
    pub phi: f64,
    pub a: f64,
    pub b: f64,
    pub d: f64,
}

/// Evaluates θ̂, ∂̄⁰θ, ∂̄⁰ω̄ and the traces â = X, b̂ = Y, d̂ of the
/// characteristic derivatives at a streamline point with known (ĉ, τ̂).
pub fn boundary_point(spec: &StreamlineSpec, gas: &impl Thermo, xi: f64, c: f64, tau: f64) -> BoundaryPoint {
    let w = spec.wbar(xi);
    let t = (1.0 - w * w).max(0.0).sqrt();
    let ct = spec.cos_theta(xi);
    let p1 = spec.dpsi(xi);
    let d0_theta = ct * spec.d2psi() / (1.0 + p1 * p1);
    let d0_wbar = ct * spec.r;
    let kappa = gas.kappa(tau);
    let d = (c * d0_wbar - w * w) / (c * w * (1.0 + kappa * w * w));
    let rot = d0_theta / (kappa * w);
    BoundaryPoint {
        xi,
        theta: p1.atan(),
        wbar: w,
        t,
        c,
        tau,
        kappa,
        phi: -c * c / (2.0 * w * w) - gas.energy(tau),
        a: t * d - rot,
        b: t * d + rot,
        d,
    }
}

/// Boundary traces on [ξ₀, ξ₂] and their hodograph image.
///
/// Arrays are ordered by increasing t, i.e. from M (ξ₂) towards Q (ξ₀).
/// Sign convention: X = â > 0 and Y = b̂ < 0 on the positivity window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryData {
    pub spec: StreamlineSpec,
    pub xi: Vec<f64>,
    pub theta: Vec<f64>,
    pub wbar: Vec<f64>,
    pub c: Vec<f64>,
    pub tau: Vec<f64>,
    pub phi: Vec<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub d: Vec<f64>,
    pub kappa: Vec<f64>,
    pub z: Vec<f64>,
    pub t: Vec<f64>,
    /// Left end of the positivity window (point Q).
    pub xi0: f64,
    /// φ̂(ξ₂), the potential at the sonic point.
    pub phi_m: f64,
    /// min(â, −b̂, d̂) on the window.
    pub m0: f64,
    /// max(â, −b̂, d̂) on the window.
    pub big_m0: f64,
    pub kappa_min: f64,
}

impl BoundaryData {
    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    /// t at Q.
    pub fn t0(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// z at Q.
    pub fn z0(&self) -> f64 {
        *self.z.last().unwrap()
    }

    /// Largest |â + b̂ − 2t·d̂| over the nodes.
    pub fn identity_residual(&self) -> f64 {
        (0..self.len())
            .map(|i| (self.a[i] + self.b[i] - 2.0 * self.t[i] * self.d[i]).abs())
            .fold(0.0, f64::max)
    }
}

/// Positivity margin min(â, −b̂).
fn margin(p: &BoundaryPoint) -> f64 {
    p.a.min(-p.b)
}

/// Builds the boundary data on `n` t-uniform intervals over the positivity
/// window [ξ₀, ξ₂].
///
/// ξ₀ is the largest ξ at which min(â, −b̂) has dropped to half its value
/// at ξ₂, located by bisection to 1e−10; ξ₀ = ξ₁ when that never happens.
pub fn build_boundary(
    spec: &StreamlineSpec,
    gas: &impl Thermo,
    window: &TauWindow,
    n: usize,
) -> Result<BoundaryData, BoundaryError> {
    let full = solve_compatibility(spec, gas, window, n)?;
    let pts: Vec<BoundaryPoint> =
        (0..full.xi.len()).map(|i| boundary_point(spec, gas, full.xi[i], full.c[i], full.tau[i])).collect();
    let m_ref = margin(&pts[0]);
    if !(m_ref > 0.0 && margin(&pts[1]) > 0.0) {
        return Err(BoundaryError::EmptyPositivityWindow { a: pts[1].a, b: pts[1].b });
    }
    let half = 0.5 * m_ref;
    let xi0 = match pts.iter().position(|p| margin(p) < half) {
        None => spec.xi1,
        Some(i) => {
            // margin(ξ) − half changes sign between nodes i−1 and i
            let eval = |xi: f64| -> Result<f64, BoundaryError> {
                let c = full.c_at(xi);
                let tau = gas
                    .tau_from_c(c, window, full.tau[i])
                    .map_err(|source| BoundaryError::TauExit { xi, source })?;
                Ok(margin(&boundary_point(spec, gas, xi, c, tau)) - half)
            };
            let (mut lo, mut hi) = (full.xi[i], full.xi[i - 1]);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                if eval(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            hi
        }
    };
    build_boundary_on(spec, gas, window, spec.t_of_xi(xi0), n)
}

/// Builds boundary data on `n` t-uniform intervals over t ∈ [0, t_top],
/// integrating the compatibility ODE afresh from ξ₂.
pub fn build_boundary_on(
    spec: &StreamlineSpec,
    gas: &impl Thermo,
    window: &TauWindow,
    t_top: f64,
    n: usize,
) -> Result<BoundaryData, BoundaryError> {
    let nodes = t_uniform_nodes(spec, t_top, n.max(2));
    let sol = solve_compatibility_on(spec, gas, window, &nodes)?;
    let pts: Vec<BoundaryPoint> =
        (0..nodes.len()).map(|i| boundary_point(spec, gas, sol.xi[i], sol.c[i], sol.tau[i])).collect();
    let col = |f: fn(&BoundaryPoint) -> f64| pts.iter().map(f).collect::<Vec<f64>>();
    let phi = col(|p| p.phi);
    let phi_m = phi[0];
    let bd = BoundaryData {
        spec: *spec,
        xi: col(|p| p.xi),
        theta: col(|p| p.theta),
        wbar: col(|p| p.wbar),
        c: col(|p| p.c),
        tau: col(|p| p.tau),
        z: phi.iter().map(|v| v - phi_m).collect(),
        phi,
        a: col(|p| p.a),
        b: col(|p| p.b),
        d: col(|p| p.d),
        kappa: col(|p| p.kappa),
        t: col(|p| p.t),
        xi0: *nodes.last().unwrap(),
        phi_m,
        m0: pts.iter().map(|p| p.a.min(-p.b).min(p.d)).fold(f64::INFINITY, f64::min),
        big_m0: pts.iter().map(|p| p.a.max(-p.b).max(p.d)).fold(f64::NEG_INFINITY, f64::max),
        kappa_min: pts.iter().map(|p| p.kappa).fold(f64::INFINITY, f64::min),
    };
    check_invariants(&bd)?;
    Ok(bd)
}

fn check_invariants(bd: &BoundaryData) -> Result<(), BoundaryError> {
    let fail = |m: String| Err(BoundaryError::Invariant(m));
    for i in 0..bd.len() {
        if !(bd.a[i] > 0.0 && bd.b[i] < 0.0 && bd.d[i] > 0.0) {
            return fail(format!(
                "sign of (a, b, d) = ({}, {}, {}) at xi = {}",
                bd.a[i], bd.b[i], bd.d[i], bd.xi[i]
            ));
        }
        if i > 0 && !(bd.z[i] < bd.z[i - 1] && bd.t[i] > bd.t[i - 1]) {
            return fail(format!("hodograph image not monotone at xi = {}", bd.xi[i]));
        }
    }
    Ok(())
}

/// Boundary data as functions of t along the image curve M′Q′, plus the
/// inverse ξ̂(z).
#[derive(Debug, Clone)]
pub struct BoundaryTrace {
    pub spec: StreamlineSpec,
    pub t_top: f64,
    z: Pchip,
    xi: Pchip,
    x_tilde: Pchip,
    y_tilde: Pchip,
    w_tilde: Pchip,
    lam_plus: Pchip,
    lam_minus: Pchip,
    /// ξ̂ against increasing z.
    xi_of_z: Pchip,
    x_of_z: Pchip,
    y_of_z: Pchip,
    w_of_z: Pchip,
}

/// Hodograph data X̃ = 1/â, Ỹ = −1/b̂, W̃ = d̂/(âb̂) at a boundary point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub t: f64,
    pub z: f64,
    pub xi: f64,
    pub x_tilde: f64,
    pub y_tilde: f64,
    pub w_tilde: f64,
}

impl BoundaryTrace {
    pub fn at(&self, t: f64) -> TracePoint {
        TracePoint {
            t,
            z: self.z.eval(t),
            xi: self.xi.eval(t),
            x_tilde: self.x_tilde.eval(t),
            y_tilde: self.y_tilde.eval(t),
            w_tilde: self.w_tilde.eval(t),
        }
    }

    /// The boundary curve z̃(t).
    pub fn z_tilde(&self, t: f64) -> f64 {
        self.z.eval(t)
    }

    pub fn dz_dt(&self, t: f64) -> f64 {
        self.z.deriv(t)
    }

    /// Characteristic speeds (Λ̃₊, Λ̃₋) of the boundary state.
    pub fn char_speeds(&self, t: f64) -> (f64, f64) {
        (self.lam_plus.eval(t), self.lam_minus.eval(t))
    }

    /// ∂Ỹ/∂z along the boundary curve.
    pub fn y_tilde_z(&self, t: f64) -> f64 {
        self.y_tilde.deriv(t) / self.z.deriv(t)
    }

    /// Physical boundary point (θ̂, ξ̂, ψ(ξ̂)) at parameter t.
    pub fn physical(&self, t: f64) -> (f64, f64, f64) {
        let xi = self.xi.eval(t);
        (self.spec.theta(xi), xi, self.spec.psi(xi))
    }

    pub fn xi_hat(&self, z: f64) -> f64 {
        self.xi_of_z.eval(z)
    }

    pub fn x_hat(&self, z: f64) -> f64 {
        self.x_of_z.eval(z)
    }

    pub fn y_hat(&self, z: f64) -> f64 {
        self.y_of_z.eval(z)
    }

    pub fn w_hat(&self, z: f64) -> f64 {
        self.w_of_z.eval(z)
    }
}

/// Monotone cubic interpolants of the boundary traces against t and z.
pub fn hodograph_boundary_inverse(bd: &BoundaryData) -> Result<BoundaryTrace, BoundaryError> {
    let n = bd.len();
    let xt: Vec<f64> = bd.a.iter().map(|a| 1.0 / a).collect();
    let yt: Vec<f64> = bd.b.iter().map(|b| -1.0 / b).collect();
    let wt: Vec<f64> = (0..n).map(|i| bd.d[i] / (bd.a[i] * bd.b[i])).collect();
    let (mut lp, mut lm) = (Vec::with_capacity(n), Vec::with_capacity(n));
    for i in 0..n {
        let (t, c, k) = (bd.t[i], bd.c[i], bd.kappa[i]);
        let s2 = 1.0 - t * t;
        let d1 = 1.0 + k * s2;
        let f = 1.0 / (d1 * s2 * s2.sqrt());
        let (p, m) = char_speeds(t, c, f, -s2 * s2 * f / c, xt[i], yt[i]);
        lp.push(p);
        lm.push(m);
    }
    let rev = |v: &[f64]| v.iter().rev().copied().collect::<Vec<f64>>();
    let zr = rev(&bd.z);
    Ok(BoundaryTrace {
        spec: bd.spec,
        t_top: bd.t0(),
        z: Pchip::new(bd.t.clone(), bd.z.clone())?,
        xi: Pchip::new(bd.t.clone(), bd.xi.clone())?,
        x_tilde: Pchip::new(bd.t.clone(), xt.clone())?,
        y_tilde: Pchip::new(bd.t.clone(), yt.clone())?,
        w_tilde: Pchip::new(bd.t.clone(), wt.clone())?,
        lam_plus: Pchip::new(bd.t.clone(), lp)?,
        lam_minus: Pchip::new(bd.t.clone(), lm)?,
        xi_of_z: Pchip::new(zr.clone(), rev(&bd.xi))?,
        x_of_z: Pchip::new(zr.clone(), rev(&xt))?,
        y_of_z: Pchip::new(zr.clone(), rev(&yt))?,
        w_of_z: Pchip::new(zr, rev(&wt))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::{GasParams, IdealGas};
    use approx::assert_relative_eq;

    pub(crate) fn reference_spec(tau_m: f64) -> StreamlineSpec {
        StreamlineSpec { xi1: -0.5, xi2: 0.0, eta_m: 0.0, s1: -0.8, s2: -0.6, r: 0.9, tau_m }
    }

    fn ideal_setup() -> (StreamlineSpec, GasParams, TauWindow) {
        let gas = GasParams::new(1.0, 0.5, 0.0, 0.0).unwrap();
        (reference_spec(0.2), gas, TauWindow::unchecked(1e-3, 100.0, 1e-12))
    }

    #[test]
    fn spec_validation() {
        let mut s = reference_spec(0.2);
        assert!(s.validate().is_ok());
        s.r = -1.0;
        assert!(s.validate().is_err());
        let mut s = reference_spec(0.2);
        s.r = 3.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn sonic_point_maps_to_origin() {
        let (s, g, w) = ideal_setup();
        let bd = build_boundary(&s, &g, &w, 64).unwrap();
        assert_eq!(bd.t[0], 0.0);
        assert_eq!(bd.z[0], 0.0);
        assert_eq!(bd.xi[0], s.xi2);
        assert!(bd.identity_residual() < 1e-10);
    }

    #[test]
    fn identity_at_wbar_point_six() {
        let (s, g, _) = ideal_setup();
        // ω̄̂ = 0.6 at ξ = −0.4/r
        let xi = s.xi2 - 0.4 / s.r;
        let p = boundary_point(&s, &g, xi, 2.0, 0.3);
        assert_relative_eq!(p.wbar, 0.6, max_relative = 1e-14);
        assert_relative_eq!(p.a + p.b, 1.6 * p.d, max_relative = 1e-12);
    }

    #[test]
    fn vdw_and_closed_form_paths_agree() {
        let (s, g, w) = ideal_setup();
        let ig = IdealGas { k: 1.0, gamma: 0.5 };
        let a = solve_compatibility(&s, &g, &w, 128).unwrap();
        let b = solve_compatibility(&s, &ig, &w, 128).unwrap();
        for i in 0..a.c.len() {
            assert_relative_eq!(a.c[i], b.c[i], max_relative = 1e-11);
        }
    }

    #[test]
    fn trace_roundtrip() {
        let (s, g, w) = ideal_setup();
        let bd = build_boundary(&s, &g, &w, 64).unwrap();
        let tr = hodograph_boundary_inverse(&bd).unwrap();
        assert_eq!(tr.xi_hat(0.0), s.xi2);
        for i in 0..bd.len() {
            assert!((tr.xi_hat(bd.z[i]) - bd.xi[i]).abs() < 1e-8);
            assert_relative_eq!(tr.at(bd.t[i]).x_tilde, 1.0 / bd.a[i], max_relative = 1e-14);
        }
    }
}
