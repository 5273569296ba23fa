//! One-dimensional interpolation on sorted abscissae.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("abscissae are not strictly increasing at index {0}")]
    NotIncreasing(usize),
    #[error("need at least two points, got {0}")]
    TooFew(usize),
    #[error("length mismatch: {0} abscissae vs {1} ordinates")]
    Length(usize, usize),
}

fn check(xs: &[f64], ys: &[f64]) -> Result<(), InterpError> {
    if xs.len() != ys.len() {
        return Err(InterpError::Length(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(InterpError::TooFew(xs.len()));
    }
    match xs.windows(2).position(|w| !(w[1] > w[0])) {
        Some(i) => Err(InterpError::NotIncreasing(i + 1)),
        None => Ok(()),
    }
}

/// Index `i` with `xs[i] <= x < xs[i+1]`, clamped to the valid cells.
pub fn locate(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    if n < 2 || x <= xs[0] {
        return 0;
    }
    if x >= xs[n - 1] {
        return n - 2;
    }
    xs.partition_point(|&v| v <= x) - 1
}

/// Piecewise-linear interpolation, constant beyond the end points.
pub fn linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    if xs.len() == 1 {
        return ys[0];
    }
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[xs.len() - 1] {
        return ys[ys.len() - 1];
    }
    let i = locate(xs, x);
    let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
    ys[i] + w * (ys[i + 1] - ys[i])
}

/// Cubic Hermite interpolant on [x0, x1] from end values and slopes.
pub fn hermite(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0
        + (s3 - 2.0 * s2 + s) * h * d0
        + (-2.0 * s3 + 3.0 * s2) * y1
        + (s3 - s2) * h * d1
}

fn hermite_deriv(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let s = (x - x0) / h;
    let s2 = s * s;
    ((6.0 * s2 - 6.0 * s) * y0 + (6.0 * s - 6.0 * s2) * y1) / h
        + (3.0 * s2 - 4.0 * s + 1.0) * d0
        + (3.0 * s2 - 2.0 * s) * d1
}

/// Monotone piecewise-cubic interpolant (Fritsch–Carlson slopes with the
/// three-point end conditions). Preserves monotonicity of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, InterpError> {
        check(&x, &y)?;
        let n = x.len();
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
            return Ok(Self { x, y, d });
        }
        for k in 1..n - 1 {
            if del[k - 1] * del[k] > 0.0 {
                let w1 = 2.0 * h[k] + h[k - 1];
                let w2 = h[k] + 2.0 * h[k - 1];
                d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
            }
        }
        d[0] = end_slope(h[0], h[1], del[0], del[1]);
        d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        Ok(Self { x, y, d })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = locate(&self.x, x);
        hermite(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], self.d[i], self.d[i + 1], x)
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let i = locate(&self.x, x);
        hermite_deriv(self.x[i], self.x[i + 1], self.y[i], self.y[i + 1], self.d[i], self.d[i + 1], x)
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

fn end_slope(h0: f64, h1: f64, del0: f64, del1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * del0 - h0 * del1) / (h0 + h1);
    if d * del0 <= 0.0 {
        0.0
    } else if del0 * del1 <= 0.0 && d.abs() > 3.0 * del0.abs() {
        3.0 * del0
    } else {
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn linear_interpolates_and_clamps() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [1.0, 3.0, -1.0];
        assert_eq!(linear(&xs, &ys, 0.5), 2.0);
        assert_eq!(linear(&xs, &ys, 2.0), 1.0);
        assert_eq!(linear(&xs, &ys, -1.0), 1.0);
        assert_eq!(linear(&xs, &ys, 5.0), -1.0);
    }

    #[test]
    fn pchip_reproduces_nodes_and_smooth_data() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|v| v.exp()).collect();
        let p = Pchip::new(x.clone(), y.clone()).unwrap();
        for (a, b) in x.iter().zip(&y) {
            assert_relative_eq!(p.eval(*a), *b, max_relative = 1e-14);
        }
        assert!((p.eval(0.55) - 0.55f64.exp()).abs() < 1e-4);
        assert!((p.deriv(0.55) - 0.55f64.exp()).abs() < 1e-2);
    }

    #[test]
    fn rejects_unsorted() {
        assert_eq!(Pchip::new(vec![0.0, 0.0], vec![1.0, 2.0]), Err(InterpError::NotIncreasing(1)));
    }

    #[test]
    fn hermite_matches_cubic() {
        let f = |x: f64| x * x * x - 2.0 * x;
        let df = |x: f64| 3.0 * x * x - 2.0;
        let v = hermite(0.5, 1.5, f(0.5), f(1.5), df(0.5), df(1.5), 0.9);
        assert_relative_eq!(v, f(0.9), max_relative = 1e-13);
    }

    proptest! {
        #[test]
        fn pchip_preserves_monotone_data(steps in prop::collection::vec(0.01f64..2.0, 3..30), q in 0.0f64..1.0) {
            let x: Vec<f64> = (0..steps.len()).map(|i| i as f64).collect();
            let y: Vec<f64> = steps.iter().scan(0.0, |s, v| { *s += v; Some(*s) }).collect();
            let p = Pchip::new(x.clone(), y.clone()).unwrap();
            let xq = q * x[x.len() - 1];
            let i = locate(&x, xq);
            let v = p.eval(xq);
            prop_assert!(v >= y[i] - 1e-12 && v <= y[i + 1] + 1e-12);
            prop_assert!(p.deriv(xq) >= -1e-12);
        }
    }
}
