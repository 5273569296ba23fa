//! Property tests of the invariants the solver relies on.

use proptest::prelude::*;
use sonic_patch::angle::{eigenvalues, from_angle_vars, to_angle_vars, FlowState};
use sonic_patch::gas::{GasParams, TauWindow, Thermo};
use sonic_patch::hodograph::coefficients;
use sonic_patch::hodograph::march::{level_nodes, level_times};
use sonic_patch::inversion::{PatchNode, PatchSolution, Tag};
use sonic_patch::verify::crosscheck::{hausdorff, rel_diff};
use sonic_patch::verify::holder::holder_estimate;
use sonic_patch::verify::identities::unsplit_rates;
use sonic_patch::verify::residuals::{run_residual_suite, ResidualRegion};

fn gas() -> impl Strategy<Value = GasParams> {
    (0.5..2.0f64, 0.2..0.9f64, 0.0..0.03f64, 0.0..0.08f64).prop_map(|(k, g, a, b)| GasParams { k, gamma: g, a, b })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn sound_speed_is_minus_tau_squared_dp(gas in gas(), x in 1.05..20.0f64) {
        let tau = gas.b + x * (gas.b + 0.01);
        let (p1, _) = gas.pressure_derivs(tau).unwrap();
        let c2 = gas.c2(tau);
        prop_assert!((c2 + tau * tau * p1).abs() <= 1e-12 * c2.abs().max(tau * tau * p1.abs()));
    }

    #[test]
    fn energy_derivative_is_tau_dp(gas in gas(), x in 1.5..20.0f64) {
        let tau = gas.b + x * (gas.b + 0.01);
        let h = 1e-6 * tau;
        let fd = (gas.energy(tau + h) - gas.energy(tau - h)) / (2.0 * h);
        let (p1, _) = gas.pressure_derivs(tau).unwrap();
        prop_assert!((fd - tau * p1).abs() <= 1e-6 * (tau * p1).abs());
    }

    #[test]
    fn closure_inverts_bernoulli(k in 0.5..2.0f64, g in 0.2..0.9f64, tau in 0.08..5.0f64, t in 0.0..0.7f64) {
        let gas = GasParams { k, gamma: g, a: 0.0, b: 0.0 };
        let win = TauWindow::unchecked(0.01, 50.0, 1e-13);
        let phi_m = -1.0;
        let z = -gas.c2(tau) / (2.0 * (1.0 - t * t)) - gas.energy(tau) - phi_m;
        let back = gas.solve_tau(z, t, phi_m, &win, 1.0).unwrap();
        prop_assert!((back - tau).abs() <= 1e-10 * tau);
        let from_c = gas.tau_from_c(gas.sound_speed(tau), &win, 1.0).unwrap();
        prop_assert!((from_c - tau).abs() <= 1e-10 * tau);
    }

    #[test]
    fn eigenvalues_solve_the_characteristic_quadratic(q in 0.5..5.0f64, th in -3.0..3.0f64, m in 0.05..0.95f64) {
        let c = m * q;
        let (uu, vv) = (q * th.cos(), q * th.sin());
        prop_assume!((uu * uu - c * c).abs() > 1e-2 * q * q);
        let sl = eigenvalues(uu, vv, c).unwrap();
        for lam in [sl.lambda_plus, sl.lambda_minus] {
            let r = (uu * uu - c * c) * lam * lam - 2.0 * uu * vv * lam + vv * vv - c * c;
            let scale = (uu * uu - c * c).abs() * lam * lam + (2.0 * uu * vv * lam).abs() + vv * vv + c * c;
            prop_assert!(r.abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn angle_variables_round_trip(xi in -1.0..1.0f64, eta in -1.0..1.0f64, q in 50.0..80.0f64, th in -3.0..3.0f64) {
        let gas = GasParams { k: 1.0, gamma: 0.5, a: 0.02, b: 0.05 };
        let tau = 0.06;
        prop_assume!(gas.sound_speed(tau) < q);
        let st = FlowState { xi, eta, u: xi + q * th.cos(), v: eta + q * th.sin(), tau };
        let a = to_angle_vars(&st, &gas).unwrap();
        let (u, v) = from_angle_vars(xi, eta, &a);
        prop_assert!((u - st.u).abs() <= 1e-12 * q && (v - st.v).abs() <= 1e-12 * q);
    }

    #[test]
    fn rearranged_rates_match_unsplit_system(
        t in 1e-3..0.6f64, tau in 0.06..1.0f64, x in 0.05..3.0f64, y in 0.05..3.0f64,
    ) {
        let gas = GasParams { k: 1.0, gamma: 0.5, a: 0.02, b: 0.05 };
        let w = (x - y) / (2.0 * t);
        let co = coefficients(t, tau, &gas, x, y, w);
        prop_assume!(co.ep.abs() > 0.1 && co.em.abs() > 0.1);
        let r = co.rates(t, x, y, w, 0.0);
        let u = unsplit_rates(t, tau, &gas, x, y);
        for i in 0..2 {
            prop_assert!((r[i] - u[i]).abs() <= 1e-9 * u[i].abs().max(w.abs()).max(1.0));
        }
    }

    #[test]
    fn characteristic_speeds_have_fixed_signs(t in 1e-3..0.5f64, tau in 0.06..1.0f64, x in 0.05..3.0f64, y in 0.05..3.0f64) {
        let gas = GasParams { k: 1.0, gamma: 0.5, a: 0.02, b: 0.05 };
        let co = coefficients(t, tau, &gas, x, y, (x - y) / (2.0 * t));
        prop_assume!(co.ep > 0.0 && co.em > 0.0);
        prop_assert!(co.lam_plus > 0.0 && co.lam_minus < 0.0);
    }

    #[test]
    fn levels_nest_under_halving(delta in 0.005..0.05f64, k in 0u32..3) {
        let dt = 1e-3 / 2f64.powi(k as i32);
        let coarse = level_times(delta, dt);
        let fine = level_times(delta, dt / 2.0);
        prop_assert_eq!(coarse[0], delta);
        prop_assert!(coarse.windows(2).all(|w| w[0] > w[1]));
        prop_assert!(coarse.iter().all(|t| fine.contains(t)));
    }

    #[test]
    fn level_nodes_nest_and_keep_edges(zl in -1.0..-0.1f64, width in 0.01..0.09f64, dz in 1e-4..1e-2f64) {
        let zr = zl + width;
        let coarse = level_nodes(zl, zr, dz);
        let fine = level_nodes(zl, zr, dz / 2.0);
        prop_assert_eq!((coarse[0], *coarse.last().unwrap()), (zl, zr));
        prop_assert!(coarse.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(coarse.iter().all(|z| fine.contains(z)));
    }

    #[test]
    fn relative_difference_and_hausdorff_are_symmetric(
        a in prop::collection::vec(-10.0..10.0f64, 1..20), shift in -1.0..1.0f64,
    ) {
        let b: Vec<f64> = a.iter().map(|v| v + shift).collect();
        prop_assert_eq!(rel_diff(&a, &b), rel_diff(&b, &a));
        prop_assert_eq!(rel_diff(&a, &a), 0.0);
        let pa: Vec<(f64, f64)> = a.iter().map(|&v| (v, 0.0)).collect();
        let pb: Vec<(f64, f64)> = b.iter().map(|&v| (v, 0.0)).collect();
        prop_assert_eq!(hausdorff(&pa, &pb), hausdorff(&pb, &pa));
        prop_assert!(hausdorff(&pa, &pb) <= shift.abs() + 1e-12);
    }

    #[test]
    fn holder_exponent_ignores_affine_rescaling(alpha in 0.3..1.0f64, sx in 0.01..100.0f64, sv in 0.01..100.0f64, off in -5.0..5.0f64) {
        let x: Vec<f64> = (0..80).map(|i| -1.0 + 2.0 * i as f64 / 79.0).collect();
        let v: Vec<f64> = x.iter().map(|p| p.abs().powf(alpha)).collect();
        let base = holder_estimate(&x, &v, 5).unwrap();
        let x2: Vec<f64> = x.iter().map(|p| sx * p).collect();
        let v2: Vec<f64> = v.iter().map(|p| sv * p + off).collect();
        let scaled = holder_estimate(&x2, &v2, 5).unwrap();
        prop_assert!((base.alpha - scaled.alpha).abs() < 1e-9);
    }
}

fn linear_patch(coef: [f64; 5], jitter: f64) -> PatchSolution {
    // φ = a ξ² / 2 + b ξη + c η² / 2 + d ξ + e η, so (u, v) = ∇φ is curl free
    let [a, b, c, d, e] = coef;
    let mut nodes = Vec::new();
    let h = 1e-3;
    for i in 0..40 {
        for j in 0..40 {
            let xi = i as f64 * h + jitter * h * ((i * 7 + j * 3) % 5) as f64 / 5.0;
            let eta = j as f64 * h * 1.3;
            let t = 0.1 * eta / (39.0 * h * 1.3);
            let s = xi / (40.0 * h);
            nodes.push(PatchNode {
                xi,
                eta,
                u: a * xi + b * eta + d,
                v: b * xi + c * eta + e,
                tau: 0.5,
                c: 1.0,
                theta: 0.0,
                wbar: 0.5,
                tag: Tag::Interior,
                t,
                z: 0.0,
                s,
                x_tilde: 1.0,
                y_tilde: 1.0,
                level: j,
            });
        }
    }
    PatchSolution { nodes, phi_m: 0.0, delta_bar: 0.1 }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn resampled_gradient_field_is_curl_free(
        coef in prop::array::uniform5(-5.0..5.0f64), jitter in 0.0..0.4f64,
    ) {
        let gas = GasParams { k: 1.0, gamma: 0.5, a: 0.0, b: 0.0 };
        let r = run_residual_suite(&linear_patch(coef, jitter), &gas, &ResidualRegion::default()).unwrap();
        prop_assert!(r.points > 0);
        prop_assert!(r.irrotationality.max <= 1e-9 * (1.0 + coef.iter().map(|v| v.abs()).sum::<f64>()));
    }
}
