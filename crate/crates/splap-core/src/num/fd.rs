//! Finite-difference probes for flux-form differential residuals.
//!
//! All residuals here are measured relative to the equation's right-hand
//! side. The profiles being probed vanish at a boundary where the source term
//! u^{-gamma} blows up, so an absolute residual is dominated by the first
//! node however fine the grid; the relative defect is the quantity that is
//! actually grid-resolution limited.

/// 4th-order centered first derivative on a uniform grid: nodes j-2..j+2.
#[inline]
pub fn d1_5pt(q: &[f64], h: f64, j: usize) -> f64 {
    (q[j - 2] - 8.0 * q[j - 1] + 8.0 * q[j + 1] - q[j + 2]) / (12.0 * h)
}

/// Log-uniform grid on [t_lo, t_hi]: returns the abscissas and the uniform
/// step h of the underlying tau = ln t grid.
pub fn log_grid(t_lo: f64, t_hi: f64, n: usize) -> (Vec<f64>, f64) {
    assert!(t_lo > 0.0 && t_hi > t_lo && n >= 8);
    let tau_lo = t_lo.ln();
    let h = (t_hi.ln() - tau_lo) / (n - 1) as f64;
    ((0..n).map(|j| (tau_lo + j as f64 * h).exp()).collect(), h)
}

/// Sup over interior nodes of |-(dq/dt) - rhs| / |rhs| given samples q_j,
/// rhs_j on a [`log_grid`] with step h. The derivative is taken in the log
/// abscissa (dq/dt = e^{-tau} dq/dtau), where power-law profiles become exact
/// exponentials and the stencil error is uniform down to the boundary layer.
/// Requires rhs != 0 at interior nodes.
pub fn log_grid_residual_from_samples(ts: &[f64], qs: &[f64], rhs: &[f64], h: f64) -> f64 {
    let n = ts.len();
    let mut worst = 0.0f64;
    for j in 2..n - 2 {
        let dq_dt = d1_5pt(qs, h, j) / ts[j];
        worst = worst.max((-dq_dt - rhs[j]).abs() / rhs[j].abs());
    }
    worst
}

/// Closure form of [`log_grid_residual_from_samples`] for profiles that can
/// be evaluated pointwise without failing.
pub fn log_grid_flux_residual(
    q_of_t: impl Fn(f64) -> f64,
    rhs: impl Fn(f64) -> f64,
    t_lo: f64,
    t_hi: f64,
    n: usize,
) -> f64 {
    let (ts, h) = log_grid(t_lo, t_hi, n);
    let qs: Vec<f64> = ts.iter().map(|&t| q_of_t(t)).collect();
    let rs: Vec<f64> = ts.iter().map(|&t| rhs(t)).collect();
    log_grid_residual_from_samples(&ts, &qs, &rs, h)
}

/// Same relative sup residual on a uniform grid over [x_lo, x_hi]; used where
/// the window is bounded away from the degenerate boundary (radial barriers).
pub fn uniform_grid_flux_residual(
    q_of_x: impl Fn(f64) -> f64,
    rhs: impl Fn(f64) -> f64,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> f64 {
    signed_flux_defect(q_of_x, rhs, x_lo, x_hi, n)
        .into_iter()
        .map(|(_, defect, r)| (defect / r).abs())
        .fold(0.0, f64::max)
}

/// Pointwise signed defect (-(dq/dx) - rhs) on a uniform grid, with the rhs
/// value alongside; lets callers check one-sided inequalities rather than
/// equalities. Returns (x, defect, rhs) at interior nodes.
pub fn signed_flux_defect(
    q_of_x: impl Fn(f64) -> f64,
    rhs: impl Fn(f64) -> f64,
    x_lo: f64,
    x_hi: f64,
    n: usize,
) -> Vec<(f64, f64, f64)> {
    assert!(x_hi > x_lo && n >= 8);
    let h = (x_hi - x_lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|j| x_lo + j as f64 * h).collect();
    let qs: Vec<f64> = xs.iter().map(|&x| q_of_x(x)).collect();
    let mut out = Vec::with_capacity(n - 4);
    for j in 2..n - 2 {
        let dq = d1_5pt(&qs, h, j);
        out.push((xs[j], -dq - rhs(xs[j]), rhs(xs[j])));
    }
    out
}
