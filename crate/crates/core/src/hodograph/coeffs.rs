//! Coefficients of the rearranged hodograph system
//!
//! ```text
//! ∂̃₊X̃ = (X̃−Ỹ)/(2t) + H₁₁(X̃−Ỹ) + H₁₂t,   ∂̃₊ = ∂_t + Λ̃₊∂_z
//! ∂̃₋Ỹ = −(X̃−Ỹ)/(2t) + H₂₁(X̃−Ỹ) + H₂₂t,  ∂̃₋ = ∂_t + Λ̃₋∂_z
//! ```
//!
//! with X̃ = 1/X and Ỹ = −1/Y. H₁₁, H₂₁ enter with a plus sign and the
//! Q·Ỹ term of H₂₂ is positive; these forms reproduce the unsplit system
//! exactly (see the transcription oracle in the tests).

use crate::gas::Thermo;

/// Node-local coefficients at (z, t) with closure state τ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub tau: f64,
    pub c: f64,
    pub kappa: f64,
    pub kappa_prime: f64,
    pub mu2: f64,
    pub f: f64,
    pub g: f64,
    /// √(1−t²) = ω̄.
    pub s: f64,
    /// 1 + κ − κt² = 1 + κω̄².
    pub d1: f64,
    /// 1 + tgỸ.
    pub ep: f64,
    /// 1 − tgX̃.
    pub em: f64,
    pub lam_plus: f64,
    pub lam_minus: f64,
    pub h11: f64,
    pub h12: f64,
    pub h21: f64,
    pub h22: f64,
}

/// Λ̃₊ = cft²Ỹ/(1+tgỸ) and Λ̃₋ = −cft²X̃/(1−tgX̃).
pub fn char_speeds(t: f64, c: f64, f: f64, g: f64, x_tilde: f64, y_tilde: f64) -> (f64, f64) {
    let t2 = t * t;
    (c * f * t2 * y_tilde / (1.0 + t * g * y_tilde), -c * f * t2 * x_tilde / (1.0 - t * g * x_tilde))
}

/// All coefficients at a node. `w_tilde` is W̃ = (X̃−Ỹ)/(2t).
pub fn coefficients(t: f64, tau: f64, gas: &impl Thermo, x_tilde: f64, y_tilde: f64, w_tilde: f64) -> Coefficients {
    let c = gas.sound_speed(tau);
    let k = gas.kappa(tau);
    let kp = gas.kappa_prime(tau);
    let t2 = t * t;
    let s2 = 1.0 - t2;
    let s = s2.sqrt();
    let d1 = 1.0 + k - k * t2;
    let f = 1.0 / (d1 * s2 * s);
    let g = -s2 * s2 * f / c;
    let ep = 1.0 + t * g * y_tilde;
    let em = 1.0 - t * g * x_tilde;
    let (lam_plus, lam_minus) = char_speeds(t, c, f, g, x_tilde, y_tilde);
    let q = tau * kp - 1.0 - 2.0 * k + 2.0 * t2 * k;
    let xy = 2.0 * t * s * x_tilde * y_tilde / c;
    let wterm = t * w_tilde * (1.0 + 2.0 * k - k * t2) / (s2 * d1);
    Coefficients {
        tau,
        c,
        kappa: k,
        kappa_prime: kp,
        mu2: 1.0 / (1.0 + k),
        f,
        g,
        s,
        d1,
        ep,
        em,
        lam_plus,
        lam_minus,
        h11: s * y_tilde / (2.0 * c * d1 * ep),
        h21: s * x_tilde / (2.0 * c * d1 * em),
        h12: wterm / ep - f * s / ep * (xy - q * x_tilde),
        h22: -wterm / em + f * s / em * (xy + q * y_tilde),
    }
}

impl Coefficients {
    /// Rates (dX̃, dỸ, dW̃)/dt along the Λ̃₊, Λ̃₋ and Λ̃₊ families, with the
    /// singular quotient replaced by W̃. `y_tilde_z` is ∂_zỸ at the node.
    pub fn rates(&self, t: f64, x_tilde: f64, y_tilde: f64, w_tilde: f64, y_tilde_z: f64) -> [f64; 3] {
        let fx = w_tilde + 2.0 * t * self.h11 * w_tilde + t * self.h12;
        let fy = -w_tilde + 2.0 * t * self.h21 * w_tilde + t * self.h22;
        let fw = (self.h11 - self.h21) * w_tilde + 0.5 * (self.h12 - self.h22)
            - 0.5 * t * self.c * self.f * (y_tilde / self.ep + x_tilde / self.em) * y_tilde_z;
        [fx, fy, fw]
    }
}
