//! Angle variables (c, θ, ω̄) of a supersonic state, the characteristic
//! slopes of the self-similar system, and finite-difference checkers for
//! the characteristic-decomposition identities.
//!
//! Sign convention: the pseudo-potential satisfies ∇φ = (U, V) with
//! (U, V) = (u − ξ, v − η), so that `(U²+V²)/2 + E(τ) + φ = 0`.

use crate::gas::Thermo;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AngleError {
    #[error("subsonic state: c = {c} exceeds pseudo-speed {q}")]
    Subsonic { c: f64, q: f64 },
    #[error("zero pseudo-velocity")]
    Stagnation,
    #[error("characteristic slope denominator U² − c² = {0} is degenerate")]
    DegenerateDenominator(f64),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

/// Physical state at a self-similar point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowState {
    pub xi: f64,
    pub eta: f64,
    pub u: f64,
    pub v: f64,
    pub tau: f64,
}

/// Sound speed, flow angle and ω̄ = sin ω = c/√(U²+V²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleState {
    pub c: f64,
    pub theta: f64,
    pub wbar: f64,
}

impl AngleState {
    pub fn omega(&self) -> f64 {
        self.wbar.min(1.0).asin()
    }
    pub fn alpha(&self) -> f64 {
        self.theta + self.omega()
    }
    pub fn beta(&self) -> f64 {
        self.theta - self.omega()
    }
}

/// Slopes dη/dξ of the two characteristic families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharSlopes {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

/// Relative slack allowed when classifying a state as sonic.
const SONIC_SLACK: f64 = 1e-12;

pub fn to_angle_vars(state: &FlowState, gas: &impl Thermo) -> Result<AngleState, AngleError> {
    let (uu, vv) = (state.u - state.xi, state.v - state.eta);
    let q = uu.hypot(vv);
    if q == 0.0 {
        return Err(AngleError::Stagnation);
    }
    let c = gas.sound_speed(state.tau);
    if c > q * (1.0 + SONIC_SLACK) {
        return Err(AngleError::Subsonic { c, q });
    }
    Ok(AngleState { c, theta: vv.atan2(uu), wbar: (c / q).min(1.0) })
}

pub fn from_angle_vars(xi: f64, eta: f64, angle: &AngleState) -> (f64, f64) {
    let q = angle.c / angle.wbar;
    (xi + q * angle.theta.cos(), eta + q * angle.theta.sin())
}

/// λ± = (UV ± c√(U²+V²−c²))/(U²−c²).
pub fn eigenvalues(uu: f64, vv: f64, c: f64) -> Result<CharSlopes, AngleError> {
    let den = uu * uu - c * c;
    if den.abs() <= 1e-12 * (uu * uu + c * c) {
        return Err(AngleError::DegenerateDenominator(den));
    }
    let disc = (uu * uu + vv * vv - c * c).max(0.0).sqrt() * c;
    Ok(CharSlopes { lambda_plus: (uu * vv + disc) / den, lambda_minus: (uu * vv - disc) / den })
}

/// Scalar field on a uniform structured grid in (ξ, η), stored row-major
/// with ξ as the slow index.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    pub xi0: f64,
    pub eta0: f64,
    pub h: f64,
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Grid2 {
    pub fn from_fn(xi0: f64, eta0: f64, h: f64, nx: usize, ny: usize, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(nx * ny);
        for i in 0..nx {
            for j in 0..ny {
                data.push(f(xi0 + i as f64 * h, eta0 + j as f64 * h));
            }
        }
        Self { xi0, eta0, h, nx, ny, data }
    }

    pub fn like(&self, data: Vec<f64>) -> Self {
        Self { data, ..self.clone() }
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.ny + j]
    }

    pub fn coords(&self, i: usize, j: usize) -> (f64, f64) {
        (self.xi0 + i as f64 * self.h, self.eta0 + j as f64 * self.h)
    }

    fn same_shape(&self, o: &Grid2) -> bool {
        self.nx == o.nx && self.ny == o.ny && self.h == o.h && self.xi0 == o.xi0 && self.eta0 == o.eta0
    }

    /// Central differences; one-sided second order on the rim.
    pub fn d_xi(&self) -> Grid2 {
        self.diff(true)
    }

    pub fn d_eta(&self) -> Grid2 {
        self.diff(false)
    }

    fn diff(&self, along_xi: bool) -> Grid2 {
        let n = if along_xi { self.nx } else { self.ny };
        let get = |i: usize, j: usize, k: usize| if along_xi { self.at(k, j) } else { self.at(i, k) };
        let mut out = vec![0.0; self.data.len()];
        for i in 0..self.nx {
            for j in 0..self.ny {
                let k = if along_xi { i } else { j };
                let v = if n < 3 {
                    0.0
                } else if k == 0 {
                    (-3.0 * get(i, j, 0) + 4.0 * get(i, j, 1) - get(i, j, 2)) / (2.0 * self.h)
                } else if k == n - 1 {
                    (3.0 * get(i, j, n - 1) - 4.0 * get(i, j, n - 2) + get(i, j, n - 3)) / (2.0 * self.h)
                } else {
                    (get(i, j, k + 1) - get(i, j, k - 1)) / (2.0 * self.h)
                };
                out[i * self.ny + j] = v;
            }
        }
        self.like(out)
    }

    fn zip(&self, o: &Grid2, f: impl Fn(f64, f64) -> f64) -> Grid2 {
        self.like(self.data.iter().zip(&o.data).map(|(&a, &b)| f(a, b)).collect())
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Grid2 {
        self.like(self.data.iter().map(|&a| f(a)).collect())
    }
}

/// Direction of a normalized directional derivative.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Along α = θ + ω.
    Plus,
    /// Along β = θ − ω.
    Minus,
    /// Along the flow angle θ.
    Zero,
}

/// `cos(angle)·∂ξ + sin(angle)·∂η` by central differences.
pub fn directional_derivative(
    field: &Grid2,
    direction: Direction,
    theta: &Grid2,
    wbar: &Grid2,
) -> Result<Grid2, AngleError> {
    if !field.same_shape(theta) || !field.same_shape(wbar) {
        return Err(AngleError::GridMismatch("field, theta and wbar differ in shape".into()));
    }
    let (fx, fy) = (field.d_xi(), field.d_eta());
    let ang: Vec<f64> = theta
        .data
        .iter()
        .zip(&wbar.data)
        .map(|(&th, &w)| {
            let om = w.min(1.0).asin();
            match direction {
                Direction::Plus => th + om,
                Direction::Minus => th - om,
                Direction::Zero => th,
            }
        })
        .collect();
    Ok(field.like(
        (0..field.data.len()).map(|k| ang[k].cos() * fx.data[k] + ang[k].sin() * fy.data[k]).collect(),
    ))
}

/// Max and root-mean-square of a residual over masked points.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualStats {
    pub max: f64,
    pub l2: f64,
    pub count: usize,
}

impl ResidualStats {
    pub fn of(values: impl Iterator<Item = f64>) -> Self {
        let (mut max, mut sum, mut count) = (0.0f64, 0.0, 0usize);
        for v in values {
            max = max.max(v.abs());
            sum += v * v;
            count += 1;
        }
        let l2 = if count > 0 { (sum / count as f64).sqrt() } else { 0.0 };
        Self { max, l2, count }
    }
}

/// Named residuals of the characteristic-decomposition identities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionResiduals {
    pub angle_plus: ResidualStats,
    pub angle_minus: ResidualStats,
    pub potential_zero: ResidualStats,
    pub potential_plus: ResidualStats,
    pub potential_minus: ResidualStats,
    pub omega_plus: ResidualStats,
    pub omega_minus: ResidualStats,
    pub sound_speed_zero: ResidualStats,
    pub theta_plus: ResidualStats,
    pub theta_minus: ResidualStats,
    pub wbar_xi: ResidualStats,
    pub wbar_eta: ResidualStats,
    pub jacobian: ResidualStats,
    pub commutator: ResidualStats,
}

/// Structured grids of the angle-variable solution.
#[derive(Debug, Clone)]
pub struct AngleGrids {
    pub c: Grid2,
    pub theta: Grid2,
    pub wbar: Grid2,
    pub tau: Grid2,
}

/// Evaluates every decomposition identity on the grid and reduces over
/// the points where `mask` is true (all interior points when `None`).
///
/// The potential is recovered pointwise from Bernoulli, φ = −c²/(2ω̄²) − E(τ).
pub fn decomposition_residuals(
    g: &AngleGrids,
    gas: &impl Thermo,
    mask: Option<&[bool]>,
) -> Result<DecompositionResiduals, AngleError> {
    let (c, th, wb, tau) = (&g.c, &g.theta, &g.wbar, &g.tau);
    for o in [th, wb, tau] {
        if !c.same_shape(o) {
            return Err(AngleError::GridMismatch("angle grids differ in shape".into()));
        }
    }
    let kap = tau.map(|t| gas.kappa(t));
    let phi = Grid2 {
        data: (0..c.data.len())
            .map(|k| -c.data[k].powi(2) / (2.0 * wb.data[k].powi(2)) - gas.energy(tau.data[k]))
            .collect(),
        ..c.clone()
    };
    let om = wb.map(|w| w.min(1.0).asin());
    let dd = |f: &Grid2, d: Direction| directional_derivative(f, d, th, wb);
    let (p, m, z) = (Direction::Plus, Direction::Minus, Direction::Zero);

    let th_p = dd(th, p)?;
    let th_m = dd(th, m)?;
    let wb_p = dd(wb, p)?;
    let wb_m = dd(wb, m)?;
    let om_p = dd(&om, p)?;
    let om_m = dd(&om, m)?;
    let c_p = dd(c, p)?;
    let c_m = dd(c, m)?;
    let c_0 = dd(c, z)?;
    let wb_0 = dd(wb, z)?;
    let phi_p = dd(&phi, p)?;
    let phi_m = dd(&phi, m)?;
    let phi_0 = dd(&phi, z)?;
    let (wb_x, wb_y) = (wb.d_xi(), wb.d_eta());
    let (phi_x, phi_y) = (phi.d_xi(), phi.d_eta());

    let n = c.data.len();
    let mut r: Vec<Vec<f64>> = (0..14).map(|_| Vec::with_capacity(n)).collect();
    // commutator identity on f = ξη with the solution's own α, β
    let ff = Grid2::from_fn(c.xi0, c.eta0, c.h, c.nx, c.ny, |x, y| x * y);
    let f_p = dd(&ff, p)?;
    let f_m = dd(&ff, m)?;
    let f_mp = dd(&f_p, m)?;
    let f_pm = dd(&f_m, p)?;
    let alpha = th.zip(&om, |a, b| a + b);
    let beta = th.zip(&om, |a, b| a - b);
    let a_m = dd(&alpha, m)?;
    let b_p = dd(&beta, p)?;

    let inside = |i: usize, j: usize| -> bool {
        let k = i * c.ny + j;
        let interior = i > 1 && j > 1 && i + 2 < c.nx && j + 2 < c.ny;
        interior && mask.is_none_or(|mk| mk[k])
    };
    for i in 0..c.nx {
        for j in 0..c.ny {
            if !inside(i, j) {
                continue;
            }
            let k = i * c.ny + j;
            let (cc, w, kk) = (c.data[k], wb.data[k], kap.data[k]);
            let t = (1.0 - w * w).max(0.0).sqrt();
            let d = 1.0 + kk * w * w;
            let x = c_p.data[k] / cc;
            let y = c_m.data[k] / cc;
            let wgt = kk * t / d;
            r[0].push(th_p.data[k] + wgt * wb_p.data[k] - w * w / cc * (kk - 1.0 - 2.0 * kk * w * w) / d);
            r[1].push(th_m.data[k] - wgt * wb_m.data[k] - w * w / cc * (1.0 - kk + 2.0 * kk * w * w) / d);
            r[2].push(phi_0.data[k] - cc / w);
            r[3].push(phi_p.data[k] - cc * t / w);
            r[4].push(phi_m.data[k] - cc * t / w);
            let tan_om = w / t.max(1e-300);
            r[5].push(om_p.data[k] - (tan_om * d * x + w * w / cc));
            r[6].push(om_m.data[k] - (tan_om * d * y + w * w / cc));
            r[7].push(c_0.data[k] - (cc * wb_0.data[k] - w * w) / (w * d));
            r[8].push(th_p.data[k] - (-kk * t * w * x - w * w / cc));
            r[9].push(th_m.data[k] - (kk * t * w * y + w * w / cc));
            let wcap = (x + y) / (2.0 * t);
            let (s, co) = th.data[k].sin_cos();
            r[10].push(wb_x.data[k] - (co * w * d * wcap + co * w * w / cc - s * d * (x - y) / 2.0));
            r[11].push(wb_y.data[k] - (s * w * d * wcap + s * w * w / cc + co * d * (x - y) / 2.0));
            let jac = phi_x.data[k] * wb_y.data[k] - phi_y.data[k] * wb_x.data[k];
            r[12].push(jac - cc * d * (x - y) / (2.0 * w));
            let s2 = (2.0 * om.data[k]).sin();
            let c2w = (2.0 * om.data[k]).cos();
            let rhs = ((c2w * a_m.data[k] - b_p.data[k]) * f_p.data[k]
                + (c2w * b_p.data[k] - a_m.data[k]) * f_m.data[k])
                / s2;
            r[13].push(f_mp.data[k] - f_pm.data[k] - rhs);
        }
    }
    let st = |v: &Vec<f64>| ResidualStats::of(v.iter().copied());
    Ok(DecompositionResiduals {
        angle_plus: st(&r[0]),
        angle_minus: st(&r[1]),
        potential_zero: st(&r[2]),
        potential_plus: st(&r[3]),
        potential_minus: st(&r[4]),
        omega_plus: st(&r[5]),
        omega_minus: st(&r[6]),
        sound_speed_zero: st(&r[7]),
        theta_plus: st(&r[8]),
        theta_minus: st(&r[9]),
        wbar_xi: st(&r[10]),
        wbar_eta: st(&r[11]),
        jacobian: st(&r[12]),
        commutator: st(&r[13]),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas::GasParams;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn ideal() -> GasParams {
        GasParams::new(1.0, 0.5, 0.0, 0.0).unwrap()
    }

    /// τ with c(τ) = c for the ideal test gas.
    fn tau_for_c(c: f64) -> f64 {
        (1.5 / (c * c)).powi(2)
    }

    #[test]
    fn angle_vars_examples() {
        let g = ideal();
        let s = FlowState { xi: 0.0, eta: 0.0, u: 2.0, v: 0.0, tau: tau_for_c(1.0) };
        let a = to_angle_vars(&s, &g).unwrap();
        assert_relative_eq!(a.c, 1.0, max_relative = 1e-14);
        assert_eq!(a.theta, 0.0);
        assert_relative_eq!(a.wbar, 0.5, max_relative = 1e-14);
        let s = FlowState { u: 0.0, v: -2.0, ..s };
        let a = to_angle_vars(&s, &g).unwrap();
        assert_relative_eq!(a.theta, -PI / 2.0);
        let s = FlowState { u: 1.0, v: 0.0, ..s };
        assert_relative_eq!(to_angle_vars(&s, &g).unwrap().wbar, 1.0);
        let s = FlowState { u: 0.5, v: 0.0, ..s };
        assert!(matches!(to_angle_vars(&s, &g), Err(AngleError::Subsonic { .. })));
    }

    #[test]
    fn velocity_from_angles() {
        let (u, v) = from_angle_vars(0.0, 0.0, &AngleState { c: 1.0, theta: 0.0, wbar: 0.5 });
        assert_relative_eq!(u, 2.0);
        assert_eq!(v, 0.0);
        let (u, v) = from_angle_vars(0.0, 0.0, &AngleState { c: 1.0, theta: PI / 4.0, wbar: 1.0 });
        assert_relative_eq!(u, 0.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(v, 0.5f64.sqrt(), max_relative = 1e-15);
    }

    #[test]
    fn slopes_examples() {
        let s = eigenvalues(2.0, 0.0, 1.0).unwrap();
        assert_relative_eq!(s.lambda_plus, 3f64.sqrt() / 3.0, max_relative = 1e-14);
        assert_relative_eq!(s.lambda_minus, -3f64.sqrt() / 3.0, max_relative = 1e-14);
        // sonic: U = 0.6, V = 0.8, c = 1
        let s = eigenvalues(0.6, 0.8, 1.0).unwrap();
        assert_relative_eq!(s.lambda_plus, s.lambda_minus);
        assert_relative_eq!(s.lambda_plus, 0.48 / (0.36 - 1.0));
        assert!(eigenvalues(1.0, 0.5, 1.0).is_err());
    }

    #[test]
    fn directional_derivative_examples() {
        let n = 21;
        let h = 0.05;
        let th = Grid2::from_fn(0.0, 0.0, h, n, n, |_, _| 0.0);
        let wb = th.like(vec![0.5; n * n]);
        let xi = Grid2::from_fn(0.0, 0.0, h, n, n, |x, _| x);
        let d = directional_derivative(&xi, Direction::Zero, &th, &wb).unwrap();
        assert!(d.data.iter().all(|&v| (v - 1.0).abs() < 1e-12));
        let cst = th.like(vec![3.0; n * n]);
        let d = directional_derivative(&cst, Direction::Plus, &th, &wb).unwrap();
        assert!(d.data.iter().all(|&v| v.abs() < 1e-12));
        let th = th.like(vec![PI / 4.0; n * n]);
        let f = Grid2::from_fn(0.0, 0.0, h, n, n, |x, y| x * x + y * y);
        let d = directional_derivative(&f, Direction::Zero, &th, &wb).unwrap();
        for i in 1..n - 1 {
            for j in 1..n - 1 {
                let (x, y) = d.coords(i, j);
                assert!((d.at(i, j) - 2f64.sqrt() * (x + y)).abs() < 1e-10);
            }
        }
        let bad = Grid2::from_fn(0.0, 0.0, h, n, n + 1, |_, _| 0.0);
        assert!(directional_derivative(&bad, Direction::Zero, &th, &wb).is_err());
    }

    #[test]
    fn uniform_flow_has_consistent_residuals() {
        // A uniform flow is not a pseudo-steady solution (ξ,η enter U, V),
        // but with constant (c, θ, ω̄) every derivative term vanishes and
        // the commutator identity holds exactly.
        let n = 12;
        let g = AngleGrids {
            c: Grid2::from_fn(0.0, 0.0, 0.1, n, n, |_, _| 1.2),
            theta: Grid2::from_fn(0.0, 0.0, 0.1, n, n, |_, _| -0.3),
            wbar: Grid2::from_fn(0.0, 0.0, 0.1, n, n, |_, _| 0.7),
            tau: Grid2::from_fn(0.0, 0.0, 0.1, n, n, |_, _| tau_for_c(1.2)),
        };
        let r = decomposition_residuals(&g, &ideal(), None).unwrap();
        assert!(r.commutator.max < 1e-10);
        assert!(r.omega_plus.max < 1e-12 + 0.7f64.powi(2) / 1.2);
    }
}
