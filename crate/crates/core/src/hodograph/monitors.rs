//! Diagnostics of a completed hodograph field: bounds of X and Y, growth
//! of ∂_zX̃ towards the sonic line, sup|W̃| and Hölder fits along t = 0.

use super::march::{z_gradient, HodographField};
use crate::verify::holder::{holder_estimate, least_squares, HolderError, HolderFit};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    /// Extremes of X = 1/X̃.
    pub x_min: f64,
    pub x_max: f64,
    /// Extremes of |Y| = 1/Ỹ.
    pub y_abs_min: f64,
    pub y_abs_max: f64,
    /// Window [m̂₀/(2s), 2M̂₀s] with s the span factor of the bypassed
    /// weight, s = exp(½·sup|κ′|·Δτ).
    pub window_lo: f64,
    pub window_hi: f64,
    pub weight_span: f64,
    pub bounds_ok: bool,
    /// Exponent p of max_z|∂_zX̃| ∝ t^(−p) over the levels.
    pub grad_exponent: Option<f64>,
    pub grad_r2: Option<f64>,
    pub sup_w_tilde: f64,
    /// Hölder fit of the common value X̃ = Ỹ along the sonic trace.
    pub holder_sonic: Result<HolderFit, HolderError>,
    /// Hölder fit of W̃ along the sonic trace.
    pub holder_sonic_w: Result<HolderFit, HolderError>,
}

pub fn regularity_monitors(field: &HodographField, seed: u64) -> RegularityReport {
    let (mut x_min, mut x_max, mut y_min, mut y_max) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
    let (mut tau_lo, mut tau_hi, mut kp_max) = (f64::INFINITY, 0.0f64, 0.0f64);
    let mut sup_w = 0.0f64;
    let mut grad_pts = Vec::new();
    for l in &field.levels {
        for i in 0..l.len() {
            x_min = x_min.min(1.0 / l.x[i]);
            x_max = x_max.max(1.0 / l.x[i]);
            y_min = y_min.min(1.0 / l.y[i]);
            y_max = y_max.max(1.0 / l.y[i]);
            sup_w = sup_w.max(l.w[i].abs());
            tau_lo = tau_lo.min(l.coef[i].tau);
            tau_hi = tau_hi.max(l.coef[i].tau);
            kp_max = kp_max.max(l.coef[i].kappa_prime.abs());
        }
        if l.len() >= 3 {
            let g = z_gradient(&l.z, &l.x).into_iter().map(f64::abs).fold(0.0, f64::max);
            if g > 0.0 {
                grad_pts.push((l.t.ln(), g.ln()));
            }
        }
    }
    let span = (0.5 * kp_max * (tau_hi - tau_lo)).exp();
    let dom = &field.domain;
    let window_lo = dom.m0 / (2.0 * span);
    let window_hi = 2.0 * dom.big_m0 * span;
    let bounds_ok = x_min >= window_lo && y_min >= window_lo && x_max <= window_hi && y_max <= window_hi;
    let (grad_exponent, grad_r2) = if grad_pts.len() >= 3 {
        let (slope, _, r2) = least_squares(&grad_pts);
        (Some(-slope), Some(r2))
    } else {
        (None, None)
    };
    let s = &field.sonic;
    RegularityReport {
        x_min,
        x_max,
        y_abs_min: y_min,
        y_abs_max: y_max,
        window_lo,
        window_hi,
        weight_span: span,
        bounds_ok,
        grad_exponent,
        grad_r2,
        sup_w_tilde: sup_w,
        holder_sonic: holder_estimate(&s.z, &s.xy, seed),
        holder_sonic_w: holder_estimate(&s.z, &s.w, seed.wrapping_add(1)),
    }
}
