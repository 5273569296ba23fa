//! Pointwise identity suites on seeded random states: thermodynamic
//! relations of the gas, the eigenstructure of the self-similar system,
//! and the agreement of the rearranged hodograph coefficients with the
//! unsplit characteristic system.

use crate::angle::eigenvalues;
use crate::boundary::{solve_compatibility_on, t_uniform_nodes, BoundaryError, StreamlineSpec};
use crate::gas::{GasParams, TauWindow, Thermo};
use crate::hodograph::coefficients;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Sample counts of the random suites.
pub const THERMO_SAMPLES: usize = 1000;
pub const EIGEN_STATES: usize = 10_000;
pub const TRANSCRIPTION_STATES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoSuite {
    /// max |c² + τ²p′|/c².
    pub sound_speed_identity: f64,
    /// |κ − 2/γ| of the same gas with a = b = 0.
    pub ideal_kappa: f64,
    /// max relative gap between κ′ and a central difference of κ.
    pub kappa_prime_fd: f64,
    /// max relative error of τ after z(τ, t) → τ(z, t).
    pub bernoulli_roundtrip: f64,
}

/// Checks the gas relations at geometrically spaced τ in the lower part of
/// the window, where the states of a patch live.
pub fn thermo_suite(gas: &GasParams, window: &TauWindow, phi_m: f64, seed: u64) -> ThermoSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = window.tau_min;
    let hi = window.tau_max.min(20.0 * window.tau_min);
    let (mut c2_err, mut kp_err, mut rt_err) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..THERMO_SAMPLES {
        let tau = lo * (hi / lo).powf((i as f64 + 0.5) / THERMO_SAMPLES as f64);
        let c2 = gas.c2(tau);
        if let Ok((p1, _)) = gas.pressure_derivs(tau) {
            c2_err = c2_err.max((c2 + tau * tau * p1).abs() / c2);
        }
        let h = 1e-5 * tau;
        let fd = (gas.kappa(tau + h) - gas.kappa(tau - h)) / (2.0 * h);
        let kp = gas.kappa_prime(tau);
        kp_err = kp_err.max((kp - fd).abs() / kp.abs().max(gas.kappa(tau) / tau));
        let t: f64 = rng.gen_range(0.0..0.5);
        let z = -c2 / (2.0 * (1.0 - t * t)) - gas.energy(tau) - phi_m;
        let guess = tau * rng.gen_range(0.9..1.1);
        rt_err = match gas.solve_tau(z, t, phi_m, window, guess) {
            Ok(r) => rt_err.max((r - tau).abs() / tau),
            Err(_) => f64::INFINITY,
        };
    }
    let ideal = GasParams { a: 0.0, b: 0.0, ..*gas };
    ThermoSuite {
        sound_speed_identity: c2_err,
        ideal_kappa: (ideal.kappa(1.0) - 2.0 / gas.gamma).abs(),
        kappa_prime_fd: kp_err,
        bernoulli_roundtrip: rt_err,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSuite {
    pub states: usize,
    /// max of (U²−c²)λ² − 2UVλ + V² − c² relative to its term sizes.
    pub quadratic: f64,
    /// max |tan(θ±ω) − λ±|/max(1, |λ±|).
    pub tangent: f64,
}

/// Random supersonic states with U² − c² bounded away from zero.
pub fn eigen_suite(seed: u64) -> EigenSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut quad, mut tang) = (0.0f64, 0.0f64);
    let mut n = 0;
    while n < EIGEN_STATES {
        let q: f64 = rng.gen_range(0.5..5.0);
        let theta: f64 = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
        let c = q * rng.gen_range(0.05..0.99);
        let (uu, vv) = (q * theta.cos(), q * theta.sin());
        if (uu * uu - c * c).abs() < 1e-2 * q * q {
            continue;
        }
        let Ok(sl) = eigenvalues(uu, vv, c) else { continue };
        let om = (c / q).asin();
        for (lam, ang) in [(sl.lambda_plus, theta + om), (sl.lambda_minus, theta - om)] {
            let a2 = (uu * uu - c * c).abs() * lam * lam;
            let scale = a2 + 2.0 * (uu * vv * lam).abs() + vv * vv + c * c;
            let r = (uu * uu - c * c) * lam * lam - 2.0 * uu * vv * lam + vv * vv - c * c;
            quad = quad.max(r.abs() / scale);
            tang = tang.max((ang.tan() - lam).abs() / lam.abs().max(1.0));
        }
        n += 1;
    }
    EigenSuite { states: n, quadratic: quad, tangent: tang }
}

/// Right sides of the unsplit system for (X̃, Ỹ) along Λ̃±.
pub fn unsplit_rates(t: f64, tau: f64, gas: &impl Thermo, x: f64, y: f64) -> [f64; 2] {
    let c = gas.sound_speed(tau);
    let k = gas.kappa(tau);
    let mu2 = 1.0 / (1.0 + k);
    let s = (1.0 - t * t).sqrt();
    let f = 1.0 / ((1.0 + k * s * s) * s * s * s);
    let g = -s.powi(4) * f / c;
    let q = tau * gas.kappa_prime(tau) - 1.0 - 2.0 * k + 2.0 * t * t * k;
    let xy = 2.0 * t * t * s * x * y / c;
    let split = (x - y) / (2.0 * mu2 * t);
    [
        f * s / (1.0 + t * g * y) * (split - xy + q * x * t),
        f * s / (1.0 - t * g * x) * (-split + xy + q * y * t),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TranscriptionSuite {
    pub states: usize,
    /// max relative gap between the rearranged and the unsplit rates.
    pub max_rel: f64,
}

/// Compares the rates assembled from H_ij with [`unsplit_rates`].
pub fn transcription_suite(gas: &impl Thermo, window: &TauWindow, seed: u64) -> TranscriptionSuite {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lo = window.tau_min;
    let hi = window.tau_max.min(20.0 * window.tau_min);
    let mut worst = 0.0f64;
    let mut n = 0;
    while n < TRANSCRIPTION_STATES {
        let t: f64 = rng.gen_range(1e-3..0.6);
        let tau = lo * (hi / lo).powf(rng.gen_range(0.0..1.0));
        let x: f64 = rng.gen_range(0.05..3.0);
        let y: f64 = rng.gen_range(0.05..3.0);
        let w = (x - y) / (2.0 * t);
        let co = coefficients(t, tau, gas, x, y, w);
        if co.ep.abs() < 0.1 || co.em.abs() < 0.1 {
            continue;
        }
        let r = co.rates(t, x, y, w, 0.0);
        let u = unsplit_rates(t, tau, gas, x, y);
        for (a, b) in [(r[0], u[0]), (r[1], u[1])] {
            worst = worst.max((a - b).abs() / b.abs().max(w.abs()).max(1e-300));
        }
        n += 1;
    }
    TranscriptionSuite { states: n, max_rel: worst }
}

/// Self-convergence order of the compatibility ODE: ĉ at t_top from RK4 on
/// n, 2n and 4n t-uniform steps, order = log₂(|c_n − c_2n|/|c_2n − c_4n|).
/// n is halved from `n_max` until |c_2n − c_4n| clears round-off by
/// [`ROUNDOFF_MARGIN`], so smooth data does not report noise as an order.
/// Returns (order, n used).
pub fn compat_order(
    spec: &StreamlineSpec,
    gas: &impl Thermo,
    window: &TauWindow,
    t_top: f64,
    n_max: usize,
) -> Result<(f64, usize), BoundaryError> {
    let end = |k: usize| -> Result<f64, BoundaryError> {
        let sol = solve_compatibility_on(spec, gas, window, &t_uniform_nodes(spec, t_top, k))?;
        Ok(*sol.c.last().unwrap())
    };
    let mut n = n_max.max(MIN_COMPAT_STEPS);
    loop {
        let (a, b, c) = (end(n)?, end(2 * n)?, end(4 * n)?);
        let floor = ROUNDOFF_MARGIN * f64::EPSILON * c.abs();
        if (b - c).abs() > floor || n / 2 < MIN_COMPAT_STEPS {
            return Ok((((a - b).abs() / (b - c).abs()).log2(), n));
        }
        n /= 2;
    }
}

/// Smallest step count tried by [`compat_order`].
pub const MIN_COMPAT_STEPS: usize = 4;
/// Required ratio of the finest difference to ε·|ĉ|.
pub const ROUNDOFF_MARGIN: f64 = 1e3;
