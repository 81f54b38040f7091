//! Interpolation on strictly increasing abscissae.

use crate::error::{Error, Result};

/// Piecewise-linear interpolation with clamped extrapolation.
pub fn linear(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    debug_assert_eq!(xs.len(), ys.len());
    if x <= xs[0] {
        return ys[0];
    }
    let last = xs.len() - 1;
    if x >= xs[last] {
        return ys[last];
    }
    let k = xs.partition_point(|&t| t <= x) - 1;
    let w = (x - xs[k]) / (xs[k + 1] - xs[k]);
    ys[k] * (1.0 - w) + ys[k + 1] * w
}

/// Monotonicity-preserving cubic Hermite interpolant (Fritsch-Carlson
/// tangent limiting). Monotone data yield a monotone interpolant, which the
/// eigenfunction and quadrature-table evaluators rely on.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ms: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Domain("need >= 2 samples of equal length".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Domain("abscissae must be strictly increasing".into()));
        }
        let n = xs.len();
        let mut d = vec![0.0; n - 1];
        for k in 0..n - 1 {
            d[k] = (ys[k + 1] - ys[k]) / (xs[k + 1] - xs[k]);
        }
        let mut ms = vec![0.0; n];
        ms[0] = d[0];
        ms[n - 1] = d[n - 2];
        for k in 1..n - 1 {
            ms[k] = if d[k - 1] * d[k] > 0.0 {
                0.5 * (d[k - 1] + d[k])
            } else {
                0.0
            };
        }
        for k in 0..n - 1 {
            if d[k] == 0.0 {
                ms[k] = 0.0;
                ms[k + 1] = 0.0;
                continue;
            }
            let a = ms[k] / d[k];
            let b = ms[k + 1] / d[k];
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                ms[k] = tau * a * d[k];
                ms[k + 1] = tau * b * d[k];
            }
        }
        Ok(MonotoneCubic { xs, ys, ms })
    }

    pub fn eval(&self, x: f64) -> f64 {
        let xs = &self.xs;
        if x <= xs[0] {
            return self.ys[0];
        }
        let last = xs.len() - 1;
        if x >= xs[last] {
            return self.ys[last];
        }
        let k = xs.partition_point(|&t| t <= x) - 1;
        let h = xs[k + 1] - xs[k];
        let s = (x - xs[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.ys[k] + h10 * h * self.ms[k] + h01 * self.ys[k + 1] + h11 * h * self.ms[k + 1]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_hits_nodes_and_midpoints() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [1.0, 2.0, 0.0];
        assert_eq!(linear(&xs, &ys, 1.0), 2.0);
        assert_eq!(linear(&xs, &ys, 2.0), 1.0);
        assert_eq!(linear(&xs, &ys, -5.0), 1.0);
    }

    #[test]
    fn monotone_cubic_preserves_monotonicity() {
        // Data with a sharp knee: plain cubic splines overshoot here.
        let xs: Vec<f64> = vec![0.0, 0.1, 0.2, 0.5, 1.0];
        let ys: Vec<f64> = vec![0.0, 0.01, 0.02, 0.9, 1.0];
        let c = MonotoneCubic::new(xs, ys).unwrap();
        let mut prev = c.eval(0.0);
        for k in 1..=1000 {
            let v = c.eval(k as f64 / 1000.0);
            assert!(v >= prev - 1e-14, "not monotone at {k}");
            prev = v;
        }
    }

    #[test]
    fn monotone_cubic_reproduces_straight_lines() {
        let xs: Vec<f64> = (0..10).map(|k| k as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x - 1.0).collect();
        let c = MonotoneCubic::new(xs, ys).unwrap();
        for k in 0..90 {
            let x = k as f64 * 0.1;
            assert!((c.eval(x) - (3.0 * x - 1.0)).abs() < 1e-12);
        }
    }
}
