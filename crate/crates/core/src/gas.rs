//! Van der Waals thermodynamics.
//!
//! Pressure law `p = K/(τ−b)^{γ+1} − a/τ²`, the sound speed `c² = −τ²p′`,
//! the nonlinearity functions κ(τ) and μ²(τ), the pseudo-Bernoulli energy
//! E(τ) and the implicit closure τ(z,t) used by the hodograph solver.
//!
//! Everything downstream is written against the [`Thermo`] trait so the
//! general code path can be compared with the closed-form polytropic gas
//! in [`IdealGas`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised by the thermodynamic kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GasError {
    #[error("invalid gas parameters: {0}")]
    InvalidParams(String),
    #[error("specific volume {tau} is not above the covolume {b}")]
    Domain { tau: f64, b: f64 },
    #[error("sound speed squared is not positive at tau = {0}")]
    NonPositiveSoundSpeed(f64),
    #[error("kappa denominator 2p' + tau p'' vanishes at tau = {0}")]
    KappaPole(f64),
    #[error("no admissible specific volume in [{lo}, {hi}]")]
    NoAdmissible { lo: f64, hi: f64 },
    #[error("invalid tau window: {0}")]
    InvalidWindow(String),
    #[error("no sign change of the closure residual on [{lo}, {hi}] (z = {z}, t = {t})")]
    NoBracket { lo: f64, hi: f64, z: f64, t: f64 },
    #[error("closure residual is not monotone near tau = {0}")]
    NonMonotone(f64),
}

/// Constants of the polytropic van der Waals gas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasParams {
    #[serde(rename = "K")]
    pub k: f64,
    pub gamma: f64,
    pub a: f64,
    pub b: f64,
}

/// Thermodynamic closure consumed by the boundary builder, the solver and
/// the inversion. Implementations must be pure functions of τ.
pub trait Thermo: Sync + Send {
    /// Sound speed squared, `−τ²p′(τ)`.
    fn c2(&self, tau: f64) -> f64;
    /// `d(c²)/dτ`.
    fn dc2(&self, tau: f64) -> f64;
    fn kappa(&self, tau: f64) -> f64;
    fn kappa_prime(&self, tau: f64) -> f64;
    /// Pseudo-Bernoulli energy E(τ); satisfies `E′ = τp′ = −c²/τ`.
    fn energy(&self, tau: f64) -> f64;

    fn sound_speed(&self, tau: f64) -> f64 {
        self.c2(tau).sqrt()
    }

    fn mu_squared(&self, tau: f64) -> f64 {
        1.0 / (1.0 + self.kappa(tau))
    }

    /// Inverts the (decreasing) map τ ↦ c(τ) on the window.
    fn tau_from_c(&self, c: f64, window: &TauWindow, guess: f64) -> Result<f64, GasError> {
        let target = c * c;
        let g = |tau: f64| self.c2(tau) - target;
        let dg = |tau: f64| self.dc2(tau);
        monotone_root(g, dg, window.tau_min, window.tau_max, guess, 1e-14 * target)
            .map_err(|e| match e {
                RootFail::NoBracket => GasError::NoBracket {
                    lo: window.tau_min,
                    hi: window.tau_max,
                    z: f64::NAN,
                    t: f64::NAN,
                },
                RootFail::NonMonotone(x) => GasError::NonMonotone(x),
            })
    }

    /// Solves `c(τ)² = 2(1−t²)(−z − φ_M − E(τ))` for τ inside the window.
    ///
    /// The residual is strictly decreasing wherever p′ < 0 and κ > 0, so a
    /// sign change on the window brackets the unique root.
    fn solve_tau(
        &self,
        z: f64,
        t: f64,
        phi_m: f64,
        window: &TauWindow,
        guess: f64,
    ) -> Result<f64, GasError> {
        let s = 2.0 * (1.0 - t * t);
        let g = |tau: f64| self.c2(tau) - s * (-z - phi_m - self.energy(tau));
        // E′ = −c²/τ
        let dg = |tau: f64| self.dc2(tau) - s * self.c2(tau) / tau;
        let scale = self.c2(guess.clamp(window.tau_min, window.tau_max));
        monotone_root(g, dg, window.tau_min, window.tau_max, guess, window.rtol * scale).map_err(
            |e| match e {
                RootFail::NoBracket => GasError::NoBracket {
                    lo: window.tau_min,
                    hi: window.tau_max,
                    z,
                    t,
                },
                RootFail::NonMonotone(x) => GasError::NonMonotone(x),
            },
        )
    }
}

impl GasParams {
    pub fn new(k: f64, gamma: f64, a: f64, b: f64) -> Result<Self, GasError> {
        let g = Self { k, gamma, a, b };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GasError> {
        let finite = [self.k, self.gamma, self.a, self.b].iter().all(|v| v.is_finite());
        if !finite {
            return Err(GasError::InvalidParams("non-finite constant".into()));
        }
        if self.k <= 0.0 {
            return Err(GasError::InvalidParams(format!("K = {} must be positive", self.k)));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(GasError::InvalidParams(format!(
                "gamma = {} must lie in (0, 1)",
                self.gamma
            )));
        }
        if self.a < 0.0 || self.b < 0.0 {
            return Err(GasError::InvalidParams("a and b must be non-negative".into()));
        }
        Ok(())
    }

    fn check(&self, tau: f64) -> Result<(), GasError> {
        if tau > self.b && tau.is_finite() {
            Ok(())
        } else {
            Err(GasError::Domain { tau, b: self.b })
        }
    }

    /// p(τ) = K/(τ−b)^{γ+1} − a/τ².
    pub fn pressure(&self, tau: f64) -> Result<f64, GasError> {
        self.check(tau)?;
        Ok(self.p0(tau))
    }

    /// (p′, p″).
    pub fn pressure_derivs(&self, tau: f64) -> Result<(f64, f64), GasError> {
        self.check(tau)?;
        Ok((self.p1(tau), self.p2(tau)))
    }

    /// Sound speed with the domain and sign checks applied.
    pub fn sound_speed_checked(&self, tau: f64) -> Result<f64, GasError> {
        self.check(tau)?;
        let c2 = -tau * tau * self.p1(tau);
        if c2 <= 0.0 {
            return Err(GasError::NonPositiveSoundSpeed(tau));
        }
        Ok(c2.sqrt())
    }

    /// κ with the pole check of `2p′ + τp″`.
    pub fn kappa_checked(&self, tau: f64) -> Result<f64, GasError> {
        self.check(tau)?;
        let d = 2.0 * self.p1(tau) + tau * self.p2(tau);
        if d.abs() <= 1e-13 * (2.0 * self.p1(tau).abs() + tau * self.p2(tau).abs()) {
            return Err(GasError::KappaPole(tau));
        }
        Ok(self.kappa(tau))
    }

    pub fn bernoulli_potential(&self, tau: f64) -> Result<f64, GasError> {
        self.check(tau)?;
        Ok(self.energy(tau))
    }

    fn p0(&self, tau: f64) -> f64 {
        self.k / (tau - self.b).powf(self.gamma + 1.0) - self.a / (tau * tau)
    }

    fn p1(&self, tau: f64) -> f64 {
        let g = self.gamma;
        -self.k * (g + 1.0) / (tau - self.b).powf(g + 2.0) + 2.0 * self.a / tau.powi(3)
    }

    fn p2(&self, tau: f64) -> f64 {
        let g = self.gamma;
        self.k * (g + 1.0) * (g + 2.0) / (tau - self.b).powf(g + 3.0) - 6.0 * self.a / tau.powi(4)
    }

    /// Numerator and denominator of the rational form of κ together with
    /// their τ-derivatives.
    fn kappa_parts(&self, tau: f64) -> (f64, f64, f64, f64) {
        let g = self.gamma;
        let s = tau - self.b;
        let u = self.b / tau;
        let du = -self.b / (tau * tau);
        let r = self.a * s.powf(g + 3.0) / (self.k * (g + 1.0) * tau.powi(4));
        let dr = if self.a == 0.0 { 0.0 } else { r * ((g + 3.0) / s - 4.0 / tau) };
        let num = 2.0 - 2.0 * u - 4.0 * r;
        let den = g + 2.0 * u - 2.0 * r;
        (num, den, -2.0 * du - 4.0 * dr, 2.0 * du - 2.0 * dr)
    }
}

impl Thermo for GasParams {
    fn c2(&self, tau: f64) -> f64 {
        let g = self.gamma;
        self.k * (g + 1.0) * tau * tau / (tau - self.b).powf(g + 2.0) - 2.0 * self.a / tau
    }

    fn dc2(&self, tau: f64) -> f64 {
        -2.0 * tau * self.p1(tau) - tau * tau * self.p2(tau)
    }

    fn kappa(&self, tau: f64) -> f64 {
        let (n, d, _, _) = self.kappa_parts(tau);
        n / d
    }

    fn kappa_prime(&self, tau: f64) -> f64 {
        let (n, d, dn, dd) = self.kappa_parts(tau);
        (dn * d - n * dd) / (d * d)
    }

    fn energy(&self, tau: f64) -> f64 {
        let g = self.gamma;
        let s = tau - self.b;
        self.k / s.powf(g) * ((g + 1.0) / g + self.b / s) - 2.0 * self.a / tau
    }
}

/// Polytropic ideal gas with every quantity in closed form, including the
/// τ(z,t) closure. Serves as the independent path for the a = b = 0 check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdealGas {
    pub k: f64,
    pub gamma: f64,
}

impl Thermo for IdealGas {
    fn c2(&self, tau: f64) -> f64 {
        self.k * (self.gamma + 1.0) * tau.powf(-self.gamma)
    }

    fn dc2(&self, tau: f64) -> f64 {
        -self.gamma * self.c2(tau) / tau
    }

    fn kappa(&self, _tau: f64) -> f64 {
        2.0 / self.gamma
    }

    fn kappa_prime(&self, _tau: f64) -> f64 {
        0.0
    }

    fn energy(&self, tau: f64) -> f64 {
        self.c2(tau) / self.gamma
    }

    fn tau_from_c(&self, c: f64, window: &TauWindow, _guess: f64) -> Result<f64, GasError> {
        let tau = (self.k * (self.gamma + 1.0) / (c * c)).powf(1.0 / self.gamma);
        window.require(tau)
    }

    fn solve_tau(
        &self,
        z: f64,
        t: f64,
        phi_m: f64,
        window: &TauWindow,
        _guess: f64,
    ) -> Result<f64, GasError> {
        // E = c²/γ turns the closure into a linear equation for c².
        let s = 2.0 * (1.0 - t * t);
        let c2 = s * (-z - phi_m) / (1.0 + s / self.gamma);
        if c2 <= 0.0 {
            return Err(GasError::NoBracket {
                lo: window.tau_min,
                hi: window.tau_max,
                z,
                t,
            });
        }
        let tau = (self.k * (self.gamma + 1.0) / c2).powf(1.0 / self.gamma);
        window.require(tau)
    }
}

/// Admissible range of specific volume for a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TauWindow {
    pub tau_min: f64,
    pub tau_max: f64,
    pub tau_threshold: f64,
    /// Relative tolerance of the τ(z,t) closure.
    pub rtol: f64,
}

/// Number of sample points used to validate a window.
pub const WINDOW_SAMPLES: usize = 1000;

impl TauWindow {
    /// Builds a window and checks p′ < 0, p″ > 0, κ > 0, κ′ > 0 at
    /// [`WINDOW_SAMPLES`] geometrically spaced points.
    pub fn new(
        gas: &GasParams,
        tau_min: f64,
        tau_max: f64,
        tau_threshold: f64,
        rtol: f64,
    ) -> Result<Self, GasError> {
        if !(tau_min > gas.b && tau_max > tau_min && tau_min >= tau_threshold) {
            return Err(GasError::InvalidWindow(format!(
                "need b < tau_threshold <= tau_min < tau_max, got b = {}, threshold = {}, [{}, {}]",
                gas.b, tau_threshold, tau_min, tau_max
            )));
        }
        if !(rtol > 0.0 && rtol < 1e-6) {
            return Err(GasError::InvalidWindow(format!("tau_rtol = {rtol} out of range")));
        }
        for tau in geomspace(tau_min, tau_max, WINDOW_SAMPLES) {
            if let Some(name) = failed_condition(gas, tau) {
                return Err(GasError::InvalidWindow(format!("{name} fails at tau = {tau}")));
            }
        }
        Ok(Self { tau_min, tau_max, tau_threshold, rtol })
    }

    /// A window that trusts the caller; used with closed-form gases.
    pub fn unchecked(tau_min: f64, tau_max: f64, rtol: f64) -> Self {
        Self { tau_min, tau_max, tau_threshold: tau_min, rtol }
    }

    pub fn contains(&self, tau: f64) -> bool {
        tau >= self.tau_min && tau <= self.tau_max
    }

    fn require(&self, tau: f64) -> Result<f64, GasError> {
        if self.contains(tau) {
            Ok(tau)
        } else {
            Err(GasError::NoBracket { lo: self.tau_min, hi: self.tau_max, z: f64::NAN, t: f64::NAN })
        }
    }
}

/// Default search window for [`admissible_tau_threshold`]: a fixed offset
/// above the covolume up to a wide upper limit.
pub fn default_search_window(gas: &GasParams) -> (f64, f64) {
    (gas.b + 1e-3 * (1.0 + gas.b), 100.0 * (1.0 + gas.b))
}

fn failed_condition(gas: &GasParams, tau: f64) -> Option<&'static str> {
    let (p1, p2) = (gas.p1(tau), gas.p2(tau));
    if !(p1 < 0.0) {
        Some("p' < 0")
    } else if !(p2 > 0.0) {
        Some("p'' > 0")
    } else if !(gas.kappa(tau) > 0.0) {
        Some("kappa > 0")
    } else if !(gas.kappa_prime(tau) > 0.0) && !(gas.a == 0.0 && gas.b == 0.0) {
        // κ′ ≡ 0 for the ideal gas; the assumption κ′ > 0 is vacuous there.
        Some("kappa' > 0")
    } else {
        None
    }
}

fn geomspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n).map(move |i| {
        if i == 0 {
            lo
        } else if i + 1 == n {
            hi
        } else {
            (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp()
        }
    })
}

/// Number of scan points of the threshold search.
pub const THRESHOLD_SCAN: usize = 20_000;

/// Smallest τ₁ in the window above which p′ < 0, p″ > 0, κ > 0 and κ′ > 0
/// hold at every scanned point. The last failing scan point is refined by
/// bisection against its right neighbour.
pub fn admissible_tau_threshold(gas: &GasParams, window: (f64, f64)) -> Result<f64, GasError> {
    let (lo, hi) = window;
    if !(lo > gas.b && hi > lo) {
        return Err(GasError::InvalidWindow(format!(
            "search window [{lo}, {hi}] must be non-empty and above b = {}",
            gas.b
        )));
    }
    let pts: Vec<f64> = geomspace(lo, hi, THRESHOLD_SCAN).collect();
    let last_bad = pts.iter().rposition(|&tau| failed_condition(gas, tau).is_some());
    match last_bad {
        None => Ok(lo),
        Some(i) if i + 1 == pts.len() => Err(GasError::NoAdmissible { lo, hi }),
        Some(i) => {
            let (mut a, mut b) = (pts[i], pts[i + 1]);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                if failed_condition(gas, m).is_some() {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(b)
        }
    }
}

pub(crate) enum RootFail {
    NoBracket,
    NonMonotone(f64),
}

/// Safeguarded Newton iteration for a strictly decreasing function on
/// [lo, hi]. Bisection takes over whenever a Newton step leaves the current
/// bracket.
pub(crate) fn monotone_root(
    g: impl Fn(f64) -> f64,
    dg: impl Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    guess: f64,
    gtol: f64,
) -> Result<f64, RootFail> {
    let (glo, ghi) = (g(lo), g(hi));
    if glo == 0.0 {
        return Ok(lo);
    }
    if ghi == 0.0 {
        return Ok(hi);
    }
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(RootFail::NoBracket);
    }
    let (mut a, mut b) = (lo, hi);
    let mut x = if guess > lo && guess < hi { guess } else { 0.5 * (lo + hi) };
    for _ in 0..200 {
        let gx = g(x);
        if gx > 0.0 {
            a = x;
        } else {
            b = x;
        }
        let d = dg(x);
        if !(d < 0.0) {
            return Err(RootFail::NonMonotone(x));
        }
        let step = gx / d;
        let xn = x - step;
        let converged = gx.abs() <= gtol || step.abs() <= 4.0 * f64::EPSILON * x.abs();
        if converged {
            // one extra Newton polish keeps the result independent of how
            // close the guess was
            return Ok(if xn > a && xn < b { xn } else { x });
        }
        x = if xn > a && xn < b { xn } else { 0.5 * (a + b) };
        if b - a <= 4.0 * f64::EPSILON * b.abs() {
            return Ok(x);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn ideal() -> GasParams {
        GasParams::new(1.0, 0.5, 0.0, 0.0).unwrap()
    }

    #[test]
    fn pressure_trivial_points() {
        assert_relative_eq!(ideal().pressure(1.0).unwrap(), 1.0);
        let g = GasParams::new(1.0, 0.5, 0.0, 1.0).unwrap();
        assert_relative_eq!(g.pressure(2.0).unwrap(), 1.0);
        assert!(matches!(g.pressure(1.0), Err(GasError::Domain { .. })));
    }

    #[test]
    fn derivatives_at_unit_volume() {
        let (p1, p2) = ideal().pressure_derivs(1.0).unwrap();
        assert_relative_eq!(p1, -1.5);
        assert_relative_eq!(p2, 3.75);
        let (p1, p2) = ideal().pressure_derivs(1e6).unwrap();
        assert!(p1 < 0.0 && p1 > -1e-8 && p2 > 0.0 && p2 < 1e-8);
    }

    #[test]
    fn sound_speed_forms_agree() {
        let g = ideal();
        assert_relative_eq!(g.sound_speed(1.0), 1.5f64.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(g.sound_speed_checked(1.0).unwrap(), g.sound_speed(1.0), max_relative = 1e-12);
    }

    #[test]
    fn ideal_reductions() {
        let g = ideal();
        for tau in [0.1, 1.0, 7.5] {
            assert_eq!(g.kappa(tau), 4.0);
            assert_eq!(g.kappa_prime(tau), 0.0);
            assert_relative_eq!(g.mu_squared(tau), 0.2, max_relative = 1e-15);
        }
        assert_relative_eq!(g.energy(1.0), 3.0, max_relative = 1e-15);
        // φ = −((U²+V²)/2 + E) for U = 2, V = 0
        assert_relative_eq!(-(2.0 + g.energy(1.0)), -5.0, max_relative = 1e-15);
    }

    #[test]
    fn real_gas_kappa_matches_pressure_derivatives() {
        let g = GasParams::new(1.0, 0.5, 0.02, 0.05).unwrap();
        for tau in [0.056, 0.08, 0.3, 2.0] {
            let (p1, p2) = g.pressure_derivs(tau).unwrap();
            assert_relative_eq!(g.kappa(tau), -2.0 * p1 / (2.0 * p1 + tau * p2), max_relative = 1e-12);
            assert_relative_eq!(g.c2(tau), -tau * tau * p1, max_relative = 1e-12);
            let h = 1e-6 * tau;
            let dk = (g.kappa(tau + h) - g.kappa(tau - h)) / (2.0 * h);
            assert_relative_eq!(g.kappa_prime(tau), dk, max_relative = 1e-6, epsilon = 1e-9);
            let de = (g.energy(tau + h) - g.energy(tau - h)) / (2.0 * h);
            assert_relative_eq!(de, tau * p1, max_relative = 1e-7);
        }
    }

    #[test]
    fn validation_rejects_bad_gamma() {
        assert!(GasParams::new(1.0, 1.5, 0.0, 0.0).is_err());
        assert!(GasParams::new(-1.0, 0.5, 0.0, 0.0).is_err());
        assert!(GasParams::new(1.0, 0.5, -0.1, 0.0).is_err());
    }

    #[test]
    fn threshold_of_ideal_gas_is_window_edge() {
        assert_eq!(admissible_tau_threshold(&ideal(), (0.2, 5.0)).unwrap(), 0.2);
        let g = GasParams::new(1.0, 0.5, 0.1, 0.5).unwrap();
        assert!(admissible_tau_threshold(&g, (0.1, 0.4)).is_err());
    }

    #[test]
    fn closure_roundtrip_ideal() {
        let g = ideal();
        let w = TauWindow::new(&g, 0.05, 50.0, 0.05, 1e-12).unwrap();
        let tau_star: f64 = 1.5;
        let phi_m = 0.0;
        // t = 0: c² = 2(−z − φ_M − E)
        let z = -g.c2(tau_star) / 2.0 - g.energy(tau_star) - phi_m;
        let tau = g.solve_tau(z, 0.0, phi_m, &w, 1.0).unwrap();
        assert_relative_eq!(tau, 1.5, max_relative = 1e-12);
        let closed = IdealGas { k: 1.0, gamma: 0.5 }.solve_tau(z, 0.0, phi_m, &w, 1.0).unwrap();
        assert_relative_eq!(closed, 1.5, max_relative = 1e-13);
    }

    #[test]
    fn closure_without_bracket() {
        let g = ideal();
        let w = TauWindow::new(&g, 2.0, 3.0, 2.0, 1e-12).unwrap();
        let z = -g.c2(1.5) / 2.0 - g.energy(1.5);
        assert!(matches!(g.solve_tau(z, 0.0, 0.0, &w, 2.5), Err(GasError::NoBracket { .. })));
    }
}
