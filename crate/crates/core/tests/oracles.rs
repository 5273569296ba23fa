//! Frozen values from independent oracles: 30-digit mpmath derivatives of
//! the pressure law, a DOP853 integration of the compatibility ODE at
//! tolerance 1e-13, and closed forms worked by hand. Values are kept at
//! the printed oracle precision.
#![allow(clippy::excessive_precision)]

mod common;

use approx::assert_relative_eq;
use common::{default_window, reference_gas, rel};
use sonic_patch::angle::eigenvalues;
use sonic_patch::boundary::{build_boundary, solve_compatibility, StreamlineSpec};
use sonic_patch::gas::{admissible_tau_threshold, default_search_window, GasParams, IdealGas, TauWindow, Thermo};
use sonic_patch::hodograph::coefficients;

const TAU_1: f64 = 0.05105;
const TAU_M: f64 = 0.056155;

fn reference_spec() -> StreamlineSpec {
    StreamlineSpec { xi1: -0.5, xi2: 0.0, eta_m: 0.0, s1: -0.8, s2: -0.6, r: 0.9, tau_m: TAU_M }
}

#[test]
fn reference_threshold_is_window_floor() {
    let gas = reference_gas();
    let t1 = admissible_tau_threshold(&gas, default_search_window(&gas)).unwrap();
    assert_relative_eq!(t1, TAU_1, max_relative = 1e-15);
}

#[test]
fn sonic_state_of_reference_gas() {
    let gas = reference_gas();
    // mpmath, 30 digits, κ from −2p′/(2p′+τp″) with numerical derivatives
    assert!(rel(gas.sound_speed(TAU_M), 39.884281825571190) < 1e-14);
    assert!(rel(gas.kappa(TAU_M), 0.096072728789195150) < 1e-12);
    assert!(rel(gas.kappa_prime(TAU_M), 15.219716153082716) < 1e-11);
}

#[test]
fn van_der_waals_table() {
    let gas = reference_gas();
    let table = [
        (0.06, 539.33333333333333, 0.15367081394244468),
        (0.1, 26.432815729997476, 0.66000819384923147),
        (0.5, 2.6805777499997404, 2.5935435785689469),
        (2.0, 1.1099642982870736, 3.5955165830818484),
    ];
    for (tau, c2, kappa) in table {
        assert!(rel(gas.c2(tau), c2) < 1e-13, "c2 at {tau}");
        assert!(rel(gas.kappa(tau), kappa) < 1e-12, "kappa at {tau}");
    }
}

#[test]
fn compatibility_ode_matches_high_order_integrator() {
    let gas = reference_gas();
    let win = default_window(&gas);
    let sol = solve_compatibility(&reference_spec(), &gas, &win, 256).unwrap();
    // DOP853, rtol 1e-13, in reversed ξ
    for (xi, c) in [(-1e-4, 39.88112367111477), (-0.01, 39.56806819431044), (-0.1, 36.68601977207801)] {
        assert!(rel(sol.c_at(xi), c) < 1e-9, "c_hat({xi}) = {}", sol.c_at(xi));
    }
    assert!(rel(*sol.c.last().unwrap(), 23.100098736112457) < 1e-10);
}

#[test]
fn boundary_starts_sonic_and_stays_supersonic() {
    let gas = reference_gas();
    let bd = build_boundary(&reference_spec(), &gas, &default_window(&gas), 256).unwrap();
    assert!(bd.identity_residual() <= 1e-10);
    let t0 = bd.t0();
    // ω̄(ξ₁) = 1 − 0.9·0.5 and ξ₀ = ξ₁ for the reference streamline
    assert_relative_eq!(t0, (1.0f64 - 0.55 * 0.55).sqrt(), max_relative = 1e-12);
}

#[test]
fn ideal_closure_in_closed_form() {
    // E = c²/γ makes c² = 2(1−t²)(−z−φ_M)/(1 + 2(1−t²)/γ)
    let gas = IdealGas { k: 1.0, gamma: 0.5 };
    let vdw = GasParams::new(1.0, 0.5, 0.0, 0.0).unwrap();
    let win = TauWindow::unchecked(1e-3, 1e2, 1e-13);
    let (z, t, phi_m): (f64, f64, f64) = (-0.25, 0.3, -10.0);
    let s = 2.0 * (1.0 - t * t);
    let c2 = s * (-z - phi_m) / (1.0 + s / 0.5);
    let tau = (1.5 / c2).powf(2.0);
    assert!(rel(gas.solve_tau(z, t, phi_m, &win, 1.0).unwrap(), tau) < 1e-14);
    assert!(rel(vdw.solve_tau(z, t, phi_m, &win, 1.0).unwrap(), tau) < 1e-11);
    assert_eq!(vdw.kappa(0.7), 4.0);
    assert_eq!(vdw.kappa_prime(0.7), 0.0);
}

#[test]
fn eigenvalues_of_a_worked_state() {
    // U = 2, V = 1, c = 1: 3λ² − 4λ = 0, and tan(θ ± ω) with tanθ = tanω = 1/2
    let sl = eigenvalues(2.0, 1.0, 1.0).unwrap();
    assert_relative_eq!(sl.lambda_plus, 4.0 / 3.0, max_relative = 1e-15);
    assert!(sl.lambda_minus.abs() < 1e-15);
}

#[test]
fn coefficients_at_the_sonic_line() {
    // t = 0: f = μ², g = −μ²/c, H₁₁ = Ỹ/(2c(1+κ)), H₂₁ = X̃/(2c(1+κ))
    let gas = IdealGas { k: 1.0, gamma: 0.5 };
    let co = coefficients(0.0, 0.2, &gas, 0.7, 0.5, 0.0);
    let c = (1.5f64 * 0.2f64.powf(-0.5)).sqrt();
    assert_relative_eq!(co.c, c, max_relative = 1e-15);
    assert_relative_eq!(co.f, 0.2, max_relative = 1e-15);
    assert_relative_eq!(co.g, -0.2 / c, max_relative = 1e-15);
    assert_relative_eq!(co.h11, 0.5 / (10.0 * c), max_relative = 1e-14);
    assert_relative_eq!(co.h21, 0.7 / (10.0 * c), max_relative = 1e-14);
}
