//! Hölder exponent of sampled data from the upper envelope of increments.
//!
//! Pairs of samples are binned by log-separation; in each bin the largest
//! increment |Δv| and the separation of the pair realizing it form one
//! envelope point. A least-squares line through log|Δv| against log d
//! gives the exponent α and constant C of |Δv| ≤ C·d^α. Only separations
//! up to half the sampled span enter the fit: beyond that the envelope of
//! bounded data saturates and would flatten the slope.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum HolderError {
    #[error("need at least {MIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
    #[error("separations span {0:.2} decades, need {MIN_DECADES}")]
    InsufficientSpan(f64),
    #[error("increments vanish or too few envelope points; fit skipped")]
    Degenerate,
}

pub const MIN_SAMPLES: usize = 32;
pub const MIN_DECADES: f64 = 1.5;
pub const MAX_PAIRS: usize = 10_000;
const BINS_PER_DECADE: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HolderFit {
    pub alpha: f64,
    pub constant: f64,
    pub r2: f64,
    pub envelope_points: usize,
    pub pairs: usize,
}

/// Fits |Δvalue| ≤ C·|Δposition|^α over all pairs, or over [`MAX_PAIRS`]
/// pairs drawn with a seeded generator when there are more.
pub fn holder_estimate(positions: &[f64], values: &[f64], seed: u64) -> Result<HolderFit, HolderError> {
    let n = positions.len().min(values.len());
    if n < MIN_SAMPLES {
        return Err(HolderError::TooFewSamples(n));
    }
    let total = n * (n - 1) / 2;
    let mut pairs: Vec<(f64, f64)> = Vec::with_capacity(total.min(MAX_PAIRS));
    let pair = |i: usize, j: usize| {
        let d = (positions[i] - positions[j]).abs();
        (d > 0.0).then(|| (d, (values[i] - values[j]).abs()))
    };
    if total <= MAX_PAIRS {
        for i in 0..n {
            pairs.extend((i + 1..n).filter_map(|j| pair(i, j)));
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while pairs.len() < MAX_PAIRS {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if let Some(p) = pair(i, j) {
                pairs.push(p);
            }
        }
    }
    let dmin = pairs.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let dmax = 0.5 * pairs.iter().map(|p| p.0).fold(0.0, f64::max);
    pairs.retain(|p| p.0 <= dmax);
    let decades = (dmax / dmin).log10();
    if !(decades >= MIN_DECADES) {
        return Err(HolderError::InsufficientSpan(if decades.is_finite() { decades } else { 0.0 }));
    }
    let nbins = (decades * BINS_PER_DECADE).ceil() as usize;
    let mut env: Vec<Option<(f64, f64)>> = vec![None; nbins];
    for &(d, dv) in &pairs {
        let b = (((d / dmin).log10() / decades) * nbins as f64).floor().min(nbins as f64 - 1.0) as usize;
        if dv > env[b].map_or(0.0, |e| e.1) {
            env[b] = Some((d, dv));
        }
    }
    let pts: Vec<(f64, f64)> = env.into_iter().flatten().map(|(d, dv)| (d.ln(), dv.ln())).collect();
    if pts.len() < 3 {
        return Err(HolderError::Degenerate);
    }
    let (slope, intercept, r2) = least_squares(&pts);
    Ok(HolderFit { alpha: slope, constant: intercept.exp(), r2, envelope_points: pts.len(), pairs: pairs.len() })
}

/// Ordinary least-squares line; returns (slope, intercept, R²).
/// Exponents the estimator is validated on before it is applied to
/// solver output, and the accepted error.
pub const SYNTHETIC_EXPONENTS: [f64; 3] = [0.33, 0.5, 1.0];
pub const SYNTHETIC_TOLERANCE: f64 = 0.05;

/// Samples of |x|^α on 141 uniform points of [−1, 1].
pub fn synthetic_samples(alpha: f64) -> (Vec<f64>, Vec<f64>) {
    let n = 141;
    let x: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    let v = x.iter().map(|p: &f64| p.abs().powf(alpha)).collect();
    (x, v)
}

/// Largest |α_fit − α| over [`SYNTHETIC_EXPONENTS`]; infinite if a fit fails.
pub fn synthetic_validation(seed: u64) -> f64 {
    SYNTHETIC_EXPONENTS
        .iter()
        .map(|&alpha| {
            let (x, v) = synthetic_samples(alpha);
            holder_estimate(&x, &v, seed).map_or(f64::INFINITY, |f| (f.alpha - alpha).abs())
        })
        .fold(0.0, f64::max)
}

pub fn least_squares(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { (sxy * sxy) / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}
