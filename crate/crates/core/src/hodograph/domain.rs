//! Determinate domain Ω between the auxiliary left edge z̄(t) and the
//! boundary curve z̃(t), for 0 ≤ t ≤ δ.
//!
//! With φ increasing along the streamline, z ≤ 0 on the image curve and
//! z̃ decreases in t, so z̃ is the right edge of Ω. The left edge leaves
//! z̃(δ) at the maximal characteristic speed M̃t²:
//! `z̄(t) = z̃(δ) + M̃(δ³ − t³)/3`.

use crate::boundary::{BoundaryData, BoundaryTrace};
use crate::gas::{GasError, TauWindow, Thermo};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DomainError {
    #[error("boundary data reach no positive t")]
    ZeroT0,
    #[error("closure failed while sampling the sound speed: {0}")]
    Closure(#[from] GasError),
    #[error("left edge z_bar(0) = {0} is not left of the sonic point")]
    LeftEdge(f64),
}

/// Grid of closure samples used for ĉ₀ and ĉ₁, per direction.
pub const C_SAMPLES: usize = 64;

/// Constants of the determinate domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainOmega {
    pub delta: f64,
    pub delta0: f64,
    pub t0: f64,
    pub z0: f64,
    /// Bound M̃ on |Λ̃±|/t².
    pub m_tilde: f64,
    /// Coefficient bound M̂.
    pub m_hat: f64,
    /// m̃ = ĉ₀√(1+ψ₀²)/ψ₁, the slope scale of the boundary curve.
    pub m_small: f64,
    pub c0: f64,
    pub c1: f64,
    pub kappa_hat: f64,
    /// Weight bound Â; the weight itself is not used, so Â = 1.
    pub a_hat: f64,
    pub m0: f64,
    pub big_m0: f64,
    pub psi0: f64,
    pub psi1: f64,
    pub phi_m: f64,
    /// z̃(δ) on the trace used by the solver.
    pub z_tilde_delta: f64,
}

impl DomainOmega {
    pub fn z_bar(&self, t: f64) -> f64 {
        self.z_tilde_delta + self.m_tilde * (self.delta.powi(3) - t.powi(3)) / 3.0
    }

    pub fn z_bar0(&self) -> f64 {
        self.z_bar(0.0)
    }

    /// Re-anchors the left edge on another trace of the same boundary.
    pub fn anchored(mut self, trace: &BoundaryTrace) -> Result<Self, DomainError> {
        self.z_tilde_delta = trace.z_tilde(self.delta);
        if !(self.z_bar0() < 0.0) {
            return Err(DomainError::LeftEdge(self.z_bar0()));
        }
        Ok(self)
    }

    /// The five candidates whose minimum is δ, in the order
    /// t₀, 1/√2, ĉ₀m̂₀√κ̂/(4Â), ln2/M̂, m̃/M̃.
    pub fn delta_candidates(&self) -> [f64; 5] {
        delta_candidates(self.t0, self.c0, self.m0, self.kappa_hat, self.a_hat, self.m_hat, self.m_small, self.m_tilde)
    }
}

#[allow(clippy::too_many_arguments)]
fn delta_candidates(t0: f64, c0: f64, m0: f64, kh: f64, ah: f64, m_hat: f64, m_small: f64, m_tilde: f64) -> [f64; 5] {
    [t0, std::f64::consts::FRAC_1_SQRT_2, c0 * m0 * kh.sqrt() / (4.0 * ah), std::f64::consts::LN_2 / m_hat, m_small / m_tilde]
}

/// Computes the domain constants from the boundary data.
///
/// ĉ₀, ĉ₁ are the extremes of the closure sound speed over
/// [z̃(δ₀), 0] × [0, δ₀] on a [`C_SAMPLES`]² grid, δ₀ = min(t₀, 1/√2).
pub fn build_domain(
    bd: &BoundaryData,
    trace: &BoundaryTrace,
    gas: &impl Thermo,
    window: &TauWindow,
) -> Result<DomainOmega, DomainError> {
    let t0 = bd.t0();
    if !(t0 > 0.0) {
        return Err(DomainError::ZeroT0);
    }
    let delta0 = t0.min(std::f64::consts::FRAC_1_SQRT_2);
    let z_lo = trace.z_tilde(delta0);
    let (mut c0, mut c1) = (f64::INFINITY, 0.0f64);
    let mut guess = bd.spec.tau_m;
    for i in 0..C_SAMPLES {
        let t = delta0 * i as f64 / (C_SAMPLES - 1) as f64;
        for j in 0..C_SAMPLES {
            let z = z_lo * j as f64 / (C_SAMPLES - 1) as f64;
            let tau = gas.solve_tau(z, t, bd.phi_m, window, guess)?;
            guess = tau;
            let c = gas.sound_speed(tau);
            c0 = c0.min(c);
            c1 = c1.max(c);
        }
    }
    let kh = bd.kappa_min;
    let m0 = bd.m0;
    let a_hat = 1.0;
    let (psi0, psi1) = bd.spec.psi_bounds();
    let m_hat = 1.0 + 4.0 * a_hat * (3.0 + 4.0 * kh) / (c0 * kh.sqrt() * (1.0 + 0.5 * kh) * m0);
    let m_tilde = 8.0 * a_hat * c1 / (m0 * kh.sqrt());
    let m_small = c0 * (1.0 + psi0 * psi0).sqrt() / psi1;
    let delta = delta_candidates(t0, c0, m0, kh, a_hat, m_hat, m_small, m_tilde)
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    let dom = DomainOmega {
        delta,
        delta0,
        t0,
        z0: bd.z0(),
        m_tilde,
        m_hat,
        m_small,
        c0,
        c1,
        kappa_hat: kh,
        a_hat,
        m0,
        big_m0: bd.big_m0,
        psi0,
        psi1,
        phi_m: bd.phi_m,
        z_tilde_delta: 0.0,
    };
    dom.anchored(trace)
}
