//! First Dirichlet eigenpair of the p-Laplacian on the unit ball.
//!
//! The radial problem
//!
//!   -(r^{N-1}|phi'|^{p-2}phi')' = lambda r^{N-1}|phi|^{p-2}phi,
//!   phi'(0) = 0,  phi(1) = 0,  phi(0) = 1,
//!
//! is integrated in the flux variable q := r^{N-1}|phi'|^{p-2}phi', which is
//! regular at the origin (q ~ -lambda r^N/N) while phi'' is not defined there
//! for p != 2. A short power-series step seeds the state just off r = 0, and
//! bisection on lambda drives phi(1) to zero; the first sign change found by
//! geometric bracket growth isolates the *first* eigenvalue, below which
//! phi(1) stays positive.
//!
//! The eigenfunction is resampled on a uniform radial grid after the
//! eigenvalue converges and interpolated monotonically; barriers built on top
//! consume both phi and phi'.

use crate::error::{Error, Result};
use crate::num::interp::MonotoneCubic;
use crate::num::ode::{self, OdeOptions};
use crate::num::fd;

/// Series-start abscissa; below it the expansion error is O(r^{N + p/(p-1)}),
/// far under integrator tolerance.
const R_START: f64 = 1e-8;

/// Radial samples of the first eigenpair on the unit ball, with monotone
/// interpolants for phi and phi'. Immutable and shareable after construction.
#[derive(Debug, Clone)]
pub struct EigenPair {
    n_dim: usize,
    p: f64,
    lambda1: f64,
    rs: Vec<f64>,
    phis: Vec<f64>,
    normalization: f64,
    phi: MonotoneCubic,
    dphi: MonotoneCubic,
}

/// |x|^e sgn(x); the odd power that appears in both flux and source terms.
fn sgn_pow(x: f64, e: f64) -> f64 {
    x.abs().powf(e) * x.signum()
}

fn flux_system(
    n_dim: usize,
    p: f64,
    lambda: f64,
) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] {
    let nm1 = (n_dim - 1) as i32;
    move |r: f64, y: &[f64; 2]| {
        let rn = r.powi(nm1);
        [
            sgn_pow(y[1] / rn, 1.0 / (p - 1.0)),
            -lambda * rn * sgn_pow(y[0], p - 1.0),
        ]
    }
}

/// Leading-order state at small r: phi = 1 - (lambda/N)^{1/(p-1)} (p-1)/p r^{p/(p-1)},
/// q = -lambda r^N / N, both forced by the equation with phi(0) = 1.
fn series_state(n_dim: usize, p: f64, lambda: f64, r: f64) -> [f64; 2] {
    let n = n_dim as f64;
    [
        1.0 - (lambda / n).powf(1.0 / (p - 1.0)) * (p - 1.0) / p * r.powf(p / (p - 1.0)),
        -lambda * r.powf(n) / n,
    ]
}

/// phi(1) for a trial lambda: the shooting map bisection acts on.
fn shoot(n_dim: usize, p: f64, lambda: f64, opts: &OdeOptions) -> Result<f64> {
    let f = flux_system(n_dim, p, lambda);
    let y0 = series_state(n_dim, p, lambda, R_START);
    Ok(ode::integrate(&f, R_START, 1.0, y0, opts, |_, _| {})?[0])
}

/// Solves for the first eigenpair. `tol` is the relative bisection width on
/// lambda; profile samples are accurate to the integrator tolerance (1e-10).
pub fn solve_eigen(n_dim: usize, p: f64, tol: f64) -> Result<EigenPair> {
    if n_dim < 1 {
        return Err(Error::Domain("N must be >= 1".into()));
    }
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::Domain(format!("p must be > 1, got {p}")));
    }
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tol must be > 0, got {tol}")));
    }
    let opts = OdeOptions::default();

    // Geometric growth until phi(1) changes sign; the first crossing brackets
    // the first eigenvalue because phi(1) > 0 for all lambda below it.
    let mut lo = 1e-6;
    if shoot(n_dim, p, lo, &opts)? <= 0.0 {
        return Err(Error::Eigen(format!(
            "phi(1) not positive at the seed lambda = {lo:.1e}"
        )));
    }
    let mut hi = lo;
    let mut trace = Vec::new();
    loop {
        hi *= 2.0;
        let f_hi = shoot(n_dim, p, hi, &opts)?;
        trace.push((hi, f_hi));
        if f_hi < 0.0 {
            break;
        }
        lo = hi;
        if hi > 1e12 {
            return Err(Error::Eigen(format!(
                "no sign change of phi(1) up to lambda = {hi:.3e}; bracket trace {trace:?}"
            )));
        }
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if shoot(n_dim, p, mid, &opts)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda1 = 0.5 * (lo + hi);

    // Dense pass at the converged eigenvalue: land exactly on uniform nodes
    // so downstream finite differences see no interpolation error.
    let n = 768;
    let f = flux_system(n_dim, p, lambda1);
    let mut rs = Vec::with_capacity(n + 1);
    let mut phis = Vec::with_capacity(n + 1);
    let mut dphis = Vec::with_capacity(n + 1);
    rs.push(0.0);
    phis.push(1.0);
    dphis.push(0.0);
    let mut state = series_state(n_dim, p, lambda1, R_START);
    let mut r_prev = R_START;
    let nm1 = (n_dim - 1) as i32;
    for i in 1..=n {
        let r = i as f64 / n as f64;
        state = ode::integrate(&f, r_prev, r, state, &opts, |_, _| {})?;
        r_prev = r;
        rs.push(r);
        phis.push(state[0]);
        dphis.push(sgn_pow(state[1] / r.powi(nm1), 1.0 / (p - 1.0)));
    }
    // phi(1) sits within the bisection tolerance of zero; pin the Dirichlet
    // value so interpolation respects the boundary condition exactly.
    phis[n] = 0.0;
    let phi = MonotoneCubic::new(rs.clone(), phis.clone())?;
    let dphi = MonotoneCubic::new(rs.clone(), dphis)?;
    Ok(EigenPair {
        n_dim,
        p,
        lambda1,
        rs,
        phis,
        normalization: 1.0,
        phi,
        dphi,
    })
}

/// Free-function form of [`EigenPair::eval_phi`].
pub fn eval_phi(pair: &EigenPair, r: f64) -> Result<f64> {
    pair.eval_phi(r)
}

impl EigenPair {
    pub fn n_dim(&self) -> usize {
        self.n_dim
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda1(&self) -> f64 {
        self.lambda1
    }

    /// phi(0); the profile is scaled so this is 1.
    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn rs(&self) -> &[f64] {
        &self.rs
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    /// Monotone interpolation of the radial profile; decreasing in r.
    pub fn eval_phi(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Range(format!("r = {r} outside [0, 1]")));
        }
        Ok(self.phi.eval(r))
    }

    /// phi'(r) <= 0, from the flux samples; 0 at the center.
    pub fn eval_phi_prime(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::Range(format!("r = {r} outside [0, 1]")));
        }
        Ok(self.dphi.eval(r))
    }

    /// First eigenvalue of the ball of radius `r_scale`: r_scale^{-p} lambda1,
    /// by the rescaling law for phi_R(x) = phi(x/R).
    pub fn lambda_for_radius(&self, r_scale: f64) -> f64 {
        r_scale.powf(-self.p) * self.lambda1
    }

    /// Fresh uniform-grid samples (r, phi, q) at the converged eigenvalue,
    /// q being the flux r^{N-1}|phi'|^{p-2}phi'; computed by re-integrating
    /// the shooting system, independent of the stored interpolants.
    pub fn samples_on(&self, r_lo: f64, r_hi: f64, n: usize) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
        let opts = OdeOptions::default();
        let f = flux_system(self.n_dim, self.p, self.lambda1);
        let mut state = series_state(self.n_dim, self.p, self.lambda1, R_START);
        let mut r_prev = R_START;
        let mut rs = Vec::with_capacity(n);
        let mut phis = Vec::with_capacity(n);
        let mut qs = Vec::with_capacity(n);
        for i in 0..n {
            let r = r_lo + (r_hi - r_lo) * i as f64 / (n - 1) as f64;
            state = ode::integrate(&f, r_prev, r, state, &opts, |_, _| {})?;
            r_prev = r;
            rs.push(r);
            phis.push(state[0]);
            qs.push(state[1]);
        }
        Ok((rs, phis, qs))
    }

    /// Flux-form residual of the eigen equation on the ball of radius
    /// `scale`, with phi_R(r') := phi(r'/scale) transported from unit-ball
    /// samples and the eigenvalue scaled by scale^{-p}. Returns
    /// max |-(q_R)' - rhs| / max |rhs| over an interior uniform grid;
    /// `scale = 1` probes the computed pair itself.
    pub fn scaled_residual(&self, scale: f64, n: usize) -> Result<f64> {
        if !(scale > 0.0) {
            return Err(Error::Domain(format!("scale must be > 0, got {scale}")));
        }
        let (rs, phis, qs) = self.samples_on(0.02, 0.98, n)?;
        let h = (rs[1] - rs[0]) * scale;
        let nm1 = (self.n_dim - 1) as i32;
        let pm1 = self.p - 1.0;
        let lam_scaled = self.lambda_for_radius(scale);
        // q_R from its definition (not from the q_R = R^{N-p} q shortcut the
        // identity provides, which would make the check circular).
        let q_r: Vec<f64> = rs
            .iter()
            .zip(&qs)
            .map(|(&r, &q)| {
                let dphi_r = sgn_pow(q / r.powi(nm1), 1.0 / pm1) / scale;
                (scale * r).powi(nm1) * sgn_pow(dphi_r, pm1)
            })
            .collect();
        let rhs: Vec<f64> = rs
            .iter()
            .zip(&phis)
            .map(|(&r, &phi)| lam_scaled * (scale * r).powi(nm1) * sgn_pow(phi, pm1))
            .collect();
        let sup_rhs = rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let mut worst = 0.0f64;
        for j in 2..rs.len() - 2 {
            worst = worst.max((-fd::d1_5pt(&q_r, h, j) - rhs[j]).abs());
        }
        Ok(worst / sup_rhs)
    }

    /// Residual of the computed pair on the unit ball.
    pub fn radial_residual(&self, n: usize) -> Result<f64> {
        self.scaled_residual(1.0, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Number of eigenvalues of the symmetric tridiagonal matrix below x,
    /// by Sturm pivot counting on (diag - x) with constant off-diagonal.
    fn tridiag_count_below(diag: &[f64], off: f64, x: f64) -> usize {
        let mut count = 0;
        let mut d = diag[0] - x;
        if d < 0.0 {
            count += 1;
        }
        for i in 1..diag.len() {
            if d == 0.0 {
                d = 1e-300;
            }
            d = diag[i] - x - off * off / d;
            if d < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn tridiag_smallest_eigenvalue(diag: &[f64], off: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, diag[0].abs() + 2.0 * off.abs());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if tridiag_count_below(diag, off, mid) >= 1 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn lambda1_matches_fd_oracle_n1_p2() {
        // Oracle: dense tridiagonal eigensolve of -phi'' = lambda phi on
        // (-1, 1), whose first eigenvalue is (pi/2)^2.
        let m = 4000;
        let h = 2.0 / (m + 1) as f64;
        let diag = vec![2.0 / (h * h); m];
        let oracle = tridiag_smallest_eigenvalue(&diag, -1.0 / (h * h));
        let pair = solve_eigen(1, 2.0, 1e-10).unwrap();
        assert!(
            (pair.lambda1() - oracle).abs() < 1e-4,
            "lambda1 = {}, oracle = {oracle}",
            pair.lambda1()
        );
        let exact = (std::f64::consts::PI / 2.0).powi(2);
        assert!((pair.lambda1() - exact).abs() < 1e-6);
    }

    #[test]
    fn lambda1_matches_bessel_series_n2_p2() {
        // Oracle: first zero of J0 from its power series, squared.
        let j0 = |x: f64| {
            let mut term = 1.0f64;
            let mut sum = 1.0f64;
            for k in 1..40 {
                term *= -(x * x) / (4.0 * (k * k) as f64);
                sum += term;
            }
            sum
        };
        let (mut lo, mut hi) = (2.0f64, 3.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if j0(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = (0.5 * (lo + hi)).powi(2);
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        assert!(
            (pair.lambda1() - oracle).abs() < 1e-6,
            "lambda1 = {}, oracle = {oracle}",
            pair.lambda1()
        );
    }

    #[test]
    fn lambda1_and_profile_match_sinc_n3_p2() {
        // sin(pi r)/(pi r) solves the N = 3, p = 2 problem with value 1 at the
        // center and first zero at r = 1, so lambda1 = pi^2.
        let pair = solve_eigen(3, 2.0, 1e-10).unwrap();
        let pi = std::f64::consts::PI;
        assert!((pair.lambda1() - pi * pi).abs() < 1e-6);
        let mut worst = 0.0f64;
        for (&r, &phi) in pair.rs().iter().zip(pair.phis()).skip(1) {
            worst = worst.max((phi - (pi * r).sin() / (pi * r)).abs());
        }
        assert!(worst < 1e-8, "sup profile error {worst:.3e}");
    }

    #[test]
    fn lambda1_matches_p_sine_oracle_n1_p3() {
        // 1D p-Laplacian oracle: lambda1 on (-1,1) is (p-1)(pi_p/2)^p with
        // pi_p = 2 int_0^1 (1-s^p)^{-1/p} ds; exercises the p != 2 path.
        let p = 3.0;
        let pi_p = 2.0 * crate::num::quad::tanh_sinh(&|s: f64| (1.0 - s.powf(p)).powf(-1.0 / p), 0.0, 1.0, 1e-13);
        let oracle = (p - 1.0) * (pi_p / 2.0).powf(p);
        let pair = solve_eigen(1, p, 1e-11).unwrap();
        assert!(
            (pair.lambda1() - oracle).abs() < 1e-6,
            "lambda1 = {}, oracle = {oracle}",
            pair.lambda1()
        );
    }

    #[test]
    fn eval_phi_endpoints_range_and_monotonicity() {
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        assert_eq!(pair.eval_phi(0.0).unwrap(), pair.normalization());
        assert_eq!(pair.eval_phi(1.0).unwrap(), 0.0);
        assert!(pair.eval_phi(1.5).is_err());
        assert!(pair.eval_phi(-0.1).is_err());
        let mut prev = f64::INFINITY;
        for k in 0..=1000 {
            let v = pair.eval_phi(k as f64 / 1000.0).unwrap();
            assert!(v <= prev, "not decreasing at r = {}", k as f64 / 1000.0);
            prev = v;
        }
    }

    #[test]
    fn eval_phi_interpolates_sinc_between_nodes() {
        let pair = solve_eigen(3, 2.0, 1e-10).unwrap();
        let want = 2.0 / std::f64::consts::PI; // sin(pi/2)/(pi * 0.5)
        assert!((pair.eval_phi(0.5).unwrap() - want).abs() < 1e-6);
    }

    #[test]
    fn sign_structure() {
        for (n_dim, p) in [(2usize, 2.0f64), (2, 3.0), (3, 1.5)] {
            let pair = solve_eigen(n_dim, p, 1e-9).unwrap();
            for (&r, &phi) in pair.rs().iter().zip(pair.phis()) {
                if r < 1.0 {
                    assert!(phi > 0.0, "phi({r}) = {phi} not positive (N={n_dim}, p={p})");
                }
                if r > 0.0 {
                    assert!(
                        pair.eval_phi_prime(r).unwrap() < 0.0,
                        "phi'({r}) not negative (N={n_dim}, p={p})"
                    );
                }
            }
        }
    }

    #[test]
    fn radial_residual_small() {
        for (n_dim, p) in [(2usize, 2.0f64), (2, 3.0)] {
            let pair = solve_eigen(n_dim, p, 1e-11).unwrap();
            let r = pair.radial_residual(512).unwrap();
            assert!(r < 1e-6, "N={n_dim} p={p}: residual {r:.3e}");
        }
    }

    #[test]
    fn rescaling_law_residual() {
        let pair = solve_eigen(2, 3.0, 1e-11).unwrap();
        for scale in [0.5, 2.0, 10.0] {
            let r = pair.scaled_residual(scale, 512).unwrap();
            assert!(r < 1e-6, "scale {scale}: residual {r:.3e}");
        }
    }

    #[test]
    fn eigenvalue_decreases_with_radius() {
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        for r in [0.5, 1.0, 3.0] {
            assert!(pair.lambda_for_radius(2.0 * r) < pair.lambda_for_radius(r));
        }
    }
}
