//! Problem parameters (p, gamma, N) and the optional perturbation g.

use crate::error::{Error, Result};

/// Piecewise-defined locally Lipschitz scalar function on [0, inf).
///
/// Used for the perturbation g in f(u) = u^{-gamma} + g(u), for the
/// nonlinearities dominated by barrier constructions, and as input to the
/// difference-quotient scanner.
#[derive(Debug, Clone, PartialEq)]
pub enum FnSpec {
    Zero,
    Constant(f64),
    Linear { slope: f64, intercept: f64 },
    /// coeff * t^{-exponent}; singular at t = 0 for exponent > 0.
    NegPower { coeff: f64, exponent: f64 },
    /// Piecewise-linear interpolation of samples; constant extrapolation.
    /// `lipschitz` is the caller-asserted Lipschitz constant.
    Tabulated {
        ts: Vec<f64>,
        vals: Vec<f64>,
        lipschitz: f64,
    },
}

impl FnSpec {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FnSpec::Zero => 0.0,
            FnSpec::Constant(c) => *c,
            FnSpec::Linear { slope, intercept } => slope * t + intercept,
            FnSpec::NegPower { coeff, exponent } => coeff * t.powf(-exponent),
            FnSpec::Tabulated { ts, vals, .. } => {
                if ts.is_empty() {
                    return 0.0;
                }
                if t <= ts[0] {
                    return vals[0];
                }
                if t >= ts[ts.len() - 1] {
                    return vals[vals.len() - 1];
                }
                let k = ts.partition_point(|&x| x <= t) - 1;
                let w = (t - ts[k]) / (ts[k + 1] - ts[k]);
                vals[k] * (1.0 - w) + vals[k + 1] * w
            }
        }
    }

    /// One-sided derivative where the spec is differentiable; piecewise slope
    /// for tabulated data. Only consumed by Newton assembly, where an
    /// approximate derivative merely changes the iteration path.
    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            FnSpec::Zero | FnSpec::Constant(_) => 0.0,
            FnSpec::Linear { slope, .. } => *slope,
            FnSpec::NegPower { coeff, exponent } => -coeff * exponent * t.powf(-exponent - 1.0),
            FnSpec::Tabulated { ts, vals, .. } => {
                if ts.len() < 2 || t <= ts[0] || t >= ts[ts.len() - 1] {
                    return 0.0;
                }
                let k = ts.partition_point(|&x| x <= t) - 1;
                (vals[k + 1] - vals[k]) / (ts[k + 1] - ts[k])
            }
        }
    }
}

/// The triple (p, gamma, N) plus the optional perturbation g.
///
/// Every formula in the library is driven by the two derived exponents
///
///   beta_u    = p/(gamma+p-1)        (boundary rate of u),
///   beta_grad = (1-gamma)/(gamma+p-1) (boundary rate of grad u),
///
/// with beta_grad = beta_u - 1.
#[derive(Debug, Clone, PartialEq)]
pub struct Params {
    p: f64,
    gamma: f64,
    n_dim: usize,
    g: Option<FnSpec>,
}

impl Params {
    /// Requires p > 1, gamma > 0, N >= 1.
    pub fn new(p: f64, gamma: f64, n_dim: usize) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::Domain(format!("p must be > 1, got {p}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::Domain(format!("gamma must be > 0, got {gamma}")));
        }
        if n_dim < 1 {
            return Err(Error::Domain("N must be >= 1".into()));
        }
        Ok(Params {
            p,
            gamma,
            n_dim,
            g: None,
        })
    }

    pub fn with_perturbation(mut self, g: FnSpec) -> Self {
        self.g = Some(g);
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn g(&self) -> Option<&FnSpec> {
        self.g.as_ref()
    }

    /// p/(gamma+p-1), always in (0, p/(p-1)).
    pub fn beta_u(&self) -> f64 {
        self.p / (self.gamma + self.p - 1.0)
    }

    /// (1-gamma)/(gamma+p-1) = beta_u - 1; negative exactly when gamma > 1.
    pub fn beta_grad(&self) -> f64 {
        (1.0 - self.gamma) / (self.gamma + self.p - 1.0)
    }

    /// Full nonlinearity f(u) = u^{-gamma} + g(u) for u > 0.
    pub fn f(&self, u: f64) -> f64 {
        let base = u.powf(-self.gamma);
        match &self.g {
            Some(g) => base + g.eval(u),
            None => base,
        }
    }

    /// f'(u) = -gamma u^{-gamma-1} + g'(u).
    pub fn f_prime(&self, u: f64) -> f64 {
        let base = -self.gamma * u.powf(-self.gamma - 1.0);
        match &self.g {
            Some(g) => base + g.derivative(u),
            None => base,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_exponents() {
        let pr = Params::new(2.0, 3.0, 2).unwrap();
        assert_eq!(pr.beta_u(), 0.5);
        assert_eq!(pr.beta_grad(), -0.5);
        let pr = Params::new(3.0, 2.0, 2).unwrap();
        assert_eq!(pr.beta_u(), 0.75);
        assert_eq!(pr.beta_grad(), -0.25);
    }

    #[test]
    fn beta_u_inside_stated_interval() {
        for &(p, gamma) in &[(1.5, 0.3), (2.0, 3.0), (3.0, 0.01), (4.0, 10.0)] {
            let pr = Params::new(p, gamma, 3).unwrap();
            assert!(pr.beta_u() > 0.0 && pr.beta_u() < p / (p - 1.0));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Params::new(1.0, 2.0, 2).is_err());
        assert!(Params::new(2.0, 0.0, 2).is_err());
        assert!(Params::new(2.0, 2.0, 0).is_err());
    }

    #[test]
    fn fnspec_tabulated_interpolates() {
        let g = FnSpec::Tabulated {
            ts: vec![0.0, 1.0, 2.0],
            vals: vec![0.0, 2.0, 2.0],
            lipschitz: 2.0,
        };
        assert_eq!(g.eval(0.5), 1.0);
        assert_eq!(g.eval(1.5), 2.0);
        assert_eq!(g.eval(5.0), 2.0);
    }

    #[test]
    fn f_combines_singular_part_and_perturbation() {
        let pr = Params::new(2.0, 2.0, 2)
            .unwrap()
            .with_perturbation(FnSpec::Constant(3.0));
        assert!((pr.f(0.5) - (4.0 + 3.0)).abs() < 1e-15);
    }
}
