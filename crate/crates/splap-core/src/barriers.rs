//! Explicit sub- and supersolutions used to sandwich solutions of
//! -div(|grad u|^{p-2} grad u) = f(u).
//!
//! Five constructions, each validated numerically rather than trusted:
//!
//! - [`build_wmu`]: a 1D supersolution w_mu solving -(|w'|^{p-2}w')' = h(w)
//!   for a majorant h of f that decays like c/t^2, so w_mu exists on the whole
//!   half-line and sweeps upward as mu grows.
//! - [`build_eigen_power`]: the subsolution w = s phi_1^{p/(gamma+p-1)} on the
//!   unit ball, whose p-Laplacian is exactly alpha(x) w^{-gamma} with an
//!   explicit alpha; s is chosen so sup alpha <= c0.
//! - [`build_linear_lower`]: the rescaled first eigenfunction phi_R capped at
//!   its center value t0; R is chosen so the eigen equation carries the
//!   coefficient c0/2, giving the linear-in-x_N lower bound of slope
//!   C = |phi_R'(R)| near the boundary.
//! - [`build_annulus_barrier`]: the p-harmonic fundamental profile (p < N) or
//!   logarithmic profile (p = N) pinned to C_H^{-1} u0 on the inner sphere of
//!   an annulus {R < |x| < 4R} and 0 on the outer one.
//! - [`build_v0_shift`]: scaled shifts s v_0(x_N + epsilon) of the closed-form
//!   half-line profile, solving -Delta_p v = s^{gamma+p-1} v^{-gamma}.
//!
//! [`validate_barrier`] reports the signed, normalized defect of each
//! barrier's differential identity on its default grid; every builder's
//! output is expected to validate below 1e-5.

use crate::eigen_radial::EigenPair;
use crate::error::{Error, Result};
use crate::exact1d;
use crate::num::{fd, quad, roots};
use crate::params::{FnSpec, Params};

/// Tabulation horizon for the 1D supersolution w_mu.
const WMU_T_MAX: f64 = 10.0;
const WMU_TABLE_POINTS: usize = 2048;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BarrierKind {
    WMu,
    EigenPower,
    LinearLower,
    Fundamental,
    Logarithmic,
    V0Shift,
}

/// Which side of the equation the barrier sits on: a Super barrier dominates
/// solutions from above under comparison, a Sub barrier from below.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Sub,
    Super,
}

/// Geometric validity region, in the barrier's natural coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    /// 0 <= x_N <= height.
    Strip { height: f64 },
    /// |x| <= radius.
    Ball { radius: f64 },
    /// inner <= |x - x0| <= outer.
    Annulus { inner: f64, outer: f64 },
    /// x_N >= 0.
    HalfSpace,
}

#[derive(Debug, Clone)]
pub enum Barrier {
    WMu(WMuBarrier),
    EigenPower(EigenPowerBarrier),
    LinearLower(LinearLowerBarrier),
    Annulus(AnnulusBarrier),
    V0Shift(V0ShiftBarrier),
}

impl Barrier {
    pub fn kind(&self) -> BarrierKind {
        match self {
            Barrier::WMu(_) => BarrierKind::WMu,
            Barrier::EigenPower(_) => BarrierKind::EigenPower,
            Barrier::LinearLower(_) => BarrierKind::LinearLower,
            Barrier::Annulus(b) => {
                if b.p == b.n_dim as f64 {
                    BarrierKind::Logarithmic
                } else {
                    BarrierKind::Fundamental
                }
            }
            Barrier::V0Shift(_) => BarrierKind::V0Shift,
        }
    }

    pub fn sense(&self) -> Sense {
        match self {
            Barrier::WMu(_) | Barrier::V0Shift(_) => Sense::Super,
            _ => Sense::Sub,
        }
    }

    pub fn region(&self) -> Region {
        match self {
            Barrier::WMu(b) => Region::Strip { height: b.t_max() },
            Barrier::EigenPower(_) => Region::Ball { radius: 1.0 },
            Barrier::LinearLower(_) | Barrier::V0Shift(_) => Region::HalfSpace,
            Barrier::Annulus(b) => Region::Annulus {
                inner: b.r_inner,
                outer: 4.0 * b.r_inner,
            },
        }
    }

    /// Barrier value at the natural abscissa of its kind: t for WMu, radius
    /// for EigenPower and Annulus, x_N for LinearLower and V0Shift.
    pub fn profile(&self, x: f64) -> Result<f64> {
        match self {
            Barrier::WMu(b) => Ok(b.eval(x)?.0),
            Barrier::EigenPower(b) => b.eval(x),
            Barrier::LinearLower(b) => b.eval(x),
            Barrier::Annulus(b) => b.eval(x),
            Barrier::V0Shift(b) => b.eval(x),
        }
    }
}

/// Signed, normalized defects of the barrier's differential identity on its
/// default validation grid. `worst` is the sup of |residuals|.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub kind: BarrierKind,
    pub sense: Sense,
    pub nodes: Vec<f64>,
    pub residuals: Vec<f64>,
    pub worst: f64,
    /// Abscissa where |residual| peaks.
    pub worst_node: f64,
}

impl ValidationReport {
    fn from_parts(kind: BarrierKind, sense: Sense, nodes: Vec<f64>, residuals: Vec<f64>) -> Self {
        let (mut worst, mut worst_node) = (0.0f64, f64::NAN);
        for (&x, &r) in nodes.iter().zip(&residuals) {
            if r.abs() > worst {
                worst = r.abs();
                worst_node = x;
            }
        }
        ValidationReport {
            kind,
            sense,
            nodes,
            residuals,
            worst,
            worst_node,
        }
    }
}

/// Runs the kind-specific residual probe on `n` grid nodes.
pub fn validate_barrier(b: &Barrier, n: usize) -> Result<ValidationReport> {
    if n < 16 {
        return Err(Error::Domain(format!("need >= 16 validation nodes, got {n}")));
    }
    let (nodes, residuals) = match b {
        Barrier::WMu(w) => w.residuals(n)?,
        Barrier::EigenPower(w) => w.residuals(n)?,
        Barrier::LinearLower(w) => w.residuals(n)?,
        Barrier::Annulus(w) => w.residuals(n)?,
        Barrier::V0Shift(w) => w.residuals(n)?,
    };
    Ok(ValidationReport::from_parts(
        b.kind(),
        b.sense(),
        nodes,
        residuals,
    ))
}

// ---------------------------------------------------------------------------
// w_mu

/// Piecewise majorant h and its primitive H(t) = int_rho^t h in closed form:
/// a constant plateau on (0, 0.9 rho], a C^1 Hermite blend on [0.9 rho, rho],
/// and c/t^2 beyond, so H increases to the finite limit c/rho.
#[derive(Debug, Clone)]
struct Majorant {
    a: f64,
    rho: f64,
    c: f64,
    // blend cubic a0 + a2 u^2 + a3 u^3 in u = (s - 0.9 rho)/(0.1 rho)
    a0: f64,
    a2: f64,
    a3: f64,
    blend_area: f64,
    /// H(0) = -(plateau area + blend area); the minimum of H.
    h_at_zero: f64,
}

impl Majorant {
    fn new(a: f64, rho: f64, c: f64) -> Self {
        let y1 = c / (rho * rho);
        // Hermite data: value a with slope 0 on the left, value c/rho^2 with
        // slope -2c/rho^3 on the right; dm1 = (interval width) * right slope.
        let dm1 = 0.1 * rho * (-2.0 * c / rho.powi(3));
        let a0 = a;
        let a2 = -3.0 * a + 3.0 * y1 - dm1;
        let a3 = 2.0 * a - 2.0 * y1 + dm1;
        let blend_area = 0.1 * rho * (a0 + a2 / 3.0 + a3 / 4.0);
        let h_at_zero = -(a * 0.9 * rho + blend_area);
        Majorant {
            a,
            rho,
            c,
            a0,
            a2,
            a3,
            blend_area,
            h_at_zero,
        }
    }

    fn h(&self, t: f64) -> f64 {
        if t <= 0.9 * self.rho {
            self.a
        } else if t < self.rho {
            let u = (t - 0.9 * self.rho) / (0.1 * self.rho);
            self.a0 + self.a2 * u * u + self.a3 * u * u * u
        } else {
            self.c / (t * t)
        }
    }

    fn big_h(&self, t: f64) -> f64 {
        if t >= self.rho {
            self.c / self.rho - self.c / t
        } else if t >= 0.9 * self.rho {
            let u = (t - 0.9 * self.rho) / (0.1 * self.rho);
            let partial =
                0.1 * self.rho * (self.a0 * u + self.a2 * u.powi(3) / 3.0 + self.a3 * u.powi(4) / 4.0);
            partial - self.blend_area
        } else {
            -self.blend_area - self.a * (0.9 * self.rho - t)
        }
    }
}

/// The 1D supersolution profile: -(|w'|^{p-2}w')' = h(w), w(0) = 0, with the
/// energy (p-1)/p (w')^p + H(w) = mu. Tabulated by the quadrature identity
/// int_0^w (mu - H(s))^{-1/p} ds = c_p t and inverted like the exact1d family.
#[derive(Debug, Clone)]
pub struct WMuBarrier {
    p: f64,
    rho: f64,
    c: f64,
    mu: f64,
    maj: Majorant,
    ts: Vec<f64>,
    ws: Vec<f64>,
}

pub fn build_wmu(p: f64, rho: f64, c: f64, mu: f64, fspec: &FnSpec) -> Result<Barrier> {
    if !(p > 1.0) {
        return Err(Error::Domain(format!("p must be > 1, got {p}")));
    }
    if !(rho > 0.0) || !(c > 0.0) {
        return Err(Error::Domain(format!(
            "rho and c must be positive, got rho={rho}, c={c}"
        )));
    }
    // sup H = c/rho; below that level mu - H(s) hits zero at finite s and the
    // quadrature identity stops being invertible.
    if !(mu >= c / rho) {
        return Err(Error::Domain(format!(
            "mu = {mu} < c/rho = {}; mu - H(s) would vanish",
            c / rho
        )));
    }
    let n_check = 4096;
    let mut a = 0.0f64;
    for k in 1..=n_check {
        let s = rho * k as f64 / n_check as f64;
        a = a.max(fspec.eval(s).max(0.0));
    }
    let maj = Majorant::new(a + 1.0, rho, c);
    for k in 1..n_check {
        let s = rho * k as f64 / n_check as f64;
        if maj.h(s) <= fspec.eval(s).max(0.0) {
            return Err(Error::Domination(format!(
                "h({s:.6}) = {:.6} fails to dominate f^+ = {:.6}; increase c",
                maj.h(s),
                fspec.eval(s).max(0.0)
            )));
        }
    }

    // integrand (mu - H(s))^{-1/p} <= (mu - H(0))^{-1/p} pointwise gives a
    // closed-form w range covering t up to WMU_T_MAX.
    let cp = exact1d::c_p(p);
    let w_max = cp * WMU_T_MAX * (mu - maj.h_at_zero).powf(1.0 / p);
    let n = WMU_TABLE_POINTS;
    let integrand = |s: f64| (mu - maj.big_h(s)).powf(-1.0 / p);
    let mut ws = Vec::with_capacity(n + 1);
    let mut ts = Vec::with_capacity(n + 1);
    ws.push(0.0);
    ts.push(0.0);
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for j in 1..=n {
        let (lo, hi) = (
            w_max * (j - 1) as f64 / n as f64,
            w_max * j as f64 / n as f64,
        );
        let rough = quad::gauss15(&integrand, lo, hi).abs();
        let dv = quad::integrate(&integrand, lo, hi, (1e-14 * rough).max(1e-17))?;
        let new = sum + dv;
        comp += if sum.abs() >= dv.abs() {
            (sum - new) + dv
        } else {
            (dv - new) + sum
        };
        sum = new;
        ws.push(hi);
        ts.push((sum + comp) / cp);
    }
    Ok(Barrier::WMu(WMuBarrier {
        p,
        rho,
        c,
        mu,
        maj,
        ts,
        ws,
    }))
}

impl WMuBarrier {
    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn t_max(&self) -> f64 {
        *self.ts.last().unwrap()
    }

    /// The dominating right-hand side h evaluated at a barrier value.
    pub fn h(&self, w: f64) -> f64 {
        self.maj.h(w)
    }

    /// (w, w') at abscissa t; w' = c_p (mu - H(w))^{1/p} from the energy.
    pub fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let t_max = self.t_max();
        if !(0.0..=t_max * (1.0 + 1e-12)).contains(&t) {
            return Err(Error::Range(format!("t = {t} outside [0, {t_max}]")));
        }
        let cp = exact1d::c_p(self.p);
        let slope = |w: f64| cp * (self.mu - self.maj.big_h(w)).powf(1.0 / self.p);
        if t == 0.0 {
            return Ok((0.0, slope(0.0)));
        }
        let t = t.min(t_max);
        let j = self.ts.partition_point(|&x| x < t).clamp(1, self.ts.len() - 1);
        for k in [j - 1, j] {
            if (t - self.ts[k]).abs() <= 1e-13 * (1.0 + t) {
                return Ok((self.ws[k], slope(self.ws[k])));
            }
        }
        let target = cp * t;
        let base = cp * self.ts[j - 1];
        let (w_lo, w_hi) = (self.ws[j - 1], self.ws[j]);
        let integrand = |s: f64| (self.mu - self.maj.big_h(s)).powf(-1.0 / self.p);
        let mut quad_err: Option<Error> = None;
        let w = roots::bisect_newton(
            |w| {
                let rough = quad::gauss15(&integrand, w_lo, w).abs();
                match quad::integrate(&integrand, w_lo, w, (1e-14 * rough).max(1e-17)) {
                    Ok(i) => (base + i - target, integrand(w)),
                    Err(e) => {
                        quad_err = Some(e);
                        (0.0, 1.0)
                    }
                }
            },
            w_lo,
            w_hi,
            1e-15,
            cp * 1e-12 * t.max(1.0),
        );
        if let Some(e) = quad_err {
            return Err(e);
        }
        let w = w?;
        Ok((w, slope(w)))
    }

    /// Signed pointwise-relative defect of -((w')^{p-1})' = h(w) on a uniform
    /// grid; no boundary layer here since w'(0) is finite. h is only C^1 at
    /// the piece junctions w = 0.9 rho and w = rho, so stencil windows that
    /// straddle a junction image are skipped: the identity holds piecewise
    /// and a 4th-order stencil across a curvature jump probes the blend, not
    /// the construction.
    fn residuals(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let t_hi = 0.95 * self.t_max();
        let h_step = t_hi / (n - 1) as f64;
        let junction_ts: Vec<f64> = [0.9 * self.rho, self.rho]
            .iter()
            .map(|&wj| {
                let j = self.ws.partition_point(|&w| w < wj);
                self.ts[j.min(self.ts.len() - 1)]
            })
            .collect();
        let mut qs = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let t = i as f64 * h_step;
            let (w, wp) = self.eval(t)?;
            nodes.push(t);
            qs.push(wp.powf(self.p - 1.0));
            rhs.push(self.maj.h(w));
        }
        let mut out_nodes = Vec::with_capacity(n - 4);
        let mut out_res = Vec::with_capacity(n - 4);
        for j in 2..n - 2 {
            if junction_ts.iter().any(|&tj| (nodes[j] - tj).abs() <= 3.0 * h_step) {
                continue;
            }
            out_nodes.push(nodes[j]);
            out_res.push((-fd::d1_5pt(&qs, h_step, j) - rhs[j]) / rhs[j]);
        }
        Ok((out_nodes, out_res))
    }
}

// ---------------------------------------------------------------------------
// eigen-power subsolution

/// w = s phi_1(x)^{p/(gamma+p-1)} on the unit ball, with
/// -Delta_p w = alpha(x) w^{-gamma} for the explicit coefficient
/// alpha = s^{gamma+p-1} (p/(gamma+p-1))^{p-1}
///         [ (gamma-1)(p-1)/(gamma+p-1) |grad phi_1|^p + lambda_1 phi_1^p ].
#[derive(Debug, Clone)]
pub struct EigenPowerBarrier {
    params: Params,
    pair: EigenPair,
    s: f64,
    r0: f64,
    c0: f64,
    t0: f64,
}

fn alpha_formula(params: &Params, s: f64, lambda1: f64, phi: f64, dphi: f64) -> f64 {
    let p = params.p();
    let gamma = params.gamma();
    let q = gamma + p - 1.0;
    s.powf(q)
        * (p / q).powf(p - 1.0)
        * ((gamma - 1.0) * (p - 1.0) / q * dphi.abs().powf(p) + lambda1 * phi.powf(p))
}

pub fn build_eigen_power(
    params: &Params,
    c0: f64,
    t0: f64,
    pair: &EigenPair,
) -> Result<Barrier> {
    if pair.n_dim() != params.n_dim() || pair.p() != params.p() {
        return Err(Error::Config(format!(
            "eigenpair is for (N={}, p={}), params want (N={}, p={})",
            pair.n_dim(),
            pair.p(),
            params.n_dim(),
            params.p()
        )));
    }
    if !(c0 > 0.0) || !(t0 > 0.0) {
        return Err(Error::Domain(format!(
            "c0 and t0 must be positive, got c0={c0}, t0={t0}"
        )));
    }
    // alpha scales as s^{gamma+p-1}; pick s so the sup over the radial grid
    // lands exactly on c0.
    let mut sup1 = 0.0f64;
    for &r in pair.rs() {
        let phi = pair.eval_phi(r)?;
        let dphi = pair.eval_phi_prime(r)?;
        sup1 = sup1.max(alpha_formula(params, 1.0, pair.lambda1(), phi, dphi));
    }
    let q = params.gamma() + params.p() - 1.0;
    let s = (c0 / sup1).powf(1.0 / q);
    // R0 rescales the ball so the center value reaches t0:
    // R0^{beta_u} w(0) = t0.
    let w0 = s * pair.normalization().powf(params.beta_u());
    let r0 = (t0 / w0).powf(1.0 / params.beta_u());
    Ok(Barrier::EigenPower(EigenPowerBarrier {
        params: params.clone(),
        pair: pair.clone(),
        s,
        r0,
        c0,
        t0,
    }))
}

impl EigenPowerBarrier {
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Ball rescaling radius with R0^{beta_u} w(0) = t0.
    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        Ok(self.s * self.pair.eval_phi(r)?.powf(self.params.beta_u()))
    }

    /// alpha(r) of the identity -Delta_p w = alpha w^{-gamma}.
    pub fn alpha(&self, r: f64) -> Result<f64> {
        Ok(alpha_formula(
            &self.params,
            self.s,
            self.pair.lambda1(),
            self.pair.eval_phi(r)?,
            self.pair.eval_phi_prime(r)?,
        ))
    }

    /// Largest alpha over the radial sample grid; <= c0 by construction.
    pub fn sup_alpha(&self) -> Result<f64> {
        let mut sup = 0.0f64;
        for &r in self.pair.rs() {
            sup = sup.max(self.alpha(r)?);
        }
        Ok(sup)
    }

    /// Pointwise-relative defect of -(r^{N-1}|w'|^{p-2}w')' = r^{N-1} alpha w^{-gamma}
    /// on [0.02, 0.9]; the window stops short of r = 1 where w^{-gamma} blows up.
    fn residuals(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (rs, phis, qs) = self.pair.samples_on(0.02, 0.9, n)?;
        let h = rs[1] - rs[0];
        let p = self.params.p();
        let gamma = self.params.gamma();
        let beta = self.params.beta_u();
        let nm1 = (self.params.n_dim() - 1) as i32;
        let mut flux = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let r = rs[i];
            let dphi = -(qs[i].abs() / r.powi(nm1)).powf(1.0 / (p - 1.0));
            let wprime = self.s * beta * phis[i].powf(beta - 1.0) * dphi;
            flux.push(r.powi(nm1) * wprime.abs().powf(p - 2.0) * wprime);
            let w = self.s * phis[i].powf(beta);
            let alpha = alpha_formula(&self.params, self.s, self.pair.lambda1(), phis[i], dphi);
            rhs.push(r.powi(nm1) * alpha * w.powf(-gamma));
        }
        let mut nodes = Vec::with_capacity(n - 4);
        let mut res = Vec::with_capacity(n - 4);
        for j in 2..n - 2 {
            nodes.push(rs[j]);
            res.push((-fd::d1_5pt(&flux, h, j) - rhs[j]) / rhs[j]);
        }
        Ok((nodes, res))
    }
}

// ---------------------------------------------------------------------------
// linear lower bound via the rescaled eigenfunction

/// phi_R(y) = t0 phi_1(y/R) on the ball of radius R = (2 lambda_1/c0)^{1/p},
/// so that -Delta_p phi_R = (c0/2) phi_R^{p-1}. As a function of the height
/// x_N the barrier reads phi_R(R - x_N) below R and plateaus at t0 above,
/// behaving like C x_N with C = |phi_R'(R)| near the boundary.
#[derive(Debug, Clone)]
pub struct LinearLowerBarrier {
    params: Params,
    pair: EigenPair,
    r_ball: f64,
    c0: f64,
    t0: f64,
    slope: f64,
}

pub fn build_linear_lower(
    params: &Params,
    c0: f64,
    t0: f64,
    pair: &EigenPair,
) -> Result<Barrier> {
    if pair.n_dim() != params.n_dim() || pair.p() != params.p() {
        return Err(Error::Config(format!(
            "eigenpair is for (N={}, p={}), params want (N={}, p={})",
            pair.n_dim(),
            pair.p(),
            params.n_dim(),
            params.p()
        )));
    }
    if !(c0 > 0.0) || !(t0 > 0.0) {
        return Err(Error::Domain(format!(
            "c0 and t0 must be positive, got c0={c0}, t0={t0}"
        )));
    }
    // The construction needs the nonlinearity to dominate c0 t^{p-1} on the
    // open interval below the plateau level; equality at t0 itself is fine.
    let n_check = 1024;
    for k in 1..n_check {
        let t = t0 * k as f64 / n_check as f64;
        if params.f(t) <= c0 * t.powf(params.p() - 1.0) {
            return Err(Error::Domination(format!(
                "f({t:.6}) = {:.6} does not exceed c0 t^{{p-1}} = {:.6}",
                params.f(t),
                c0 * t.powf(params.p() - 1.0)
            )));
        }
    }
    let r_ball = (2.0 * pair.lambda1() / c0).powf(1.0 / params.p());
    let slope = t0 * pair.eval_phi_prime(1.0)?.abs() / r_ball;
    Ok(Barrier::LinearLower(LinearLowerBarrier {
        params: params.clone(),
        pair: pair.clone(),
        r_ball,
        c0,
        t0,
        slope,
    }))
}

impl LinearLowerBarrier {
    /// Ball radius R = (2 lambda_1/c0)^{1/p}.
    pub fn r_ball(&self) -> f64 {
        self.r_ball
    }

    pub fn c0(&self) -> f64 {
        self.c0
    }

    /// Plateau level, attained for x_N >= R.
    pub fn t0(&self) -> f64 {
        self.t0
    }

    /// Boundary slope C = |phi_R'(R)| of the linear behavior near x_N = 0.
    pub fn slope(&self) -> f64 {
        self.slope
    }

    pub fn eval(&self, x_n: f64) -> Result<f64> {
        if !(x_n >= 0.0) {
            return Err(Error::Range(format!("x_N = {x_n} is negative")));
        }
        if x_n >= self.r_ball {
            return Ok(self.t0);
        }
        Ok(self.t0 * self.pair.eval_phi((self.r_ball - x_n) / self.r_ball)?)
    }

    /// Sup-normalized defect of -(y^{N-1}|phi_R'|^{p-2}phi_R')' = (c0/2) y^{N-1} phi_R^{p-1}
    /// in the radial variable y of the ball; sup-normalization because the
    /// right side vanishes at y = R.
    fn residuals(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (rs, phis, qs) = self.pair.samples_on(0.02, 0.98, n)?;
        let p = self.params.p();
        let nm1 = (self.params.n_dim() - 1) as i32;
        let r_ball = self.r_ball;
        let h = (rs[1] - rs[0]) * r_ball;
        let mut flux = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for i in 0..n {
            let y = rs[i] * r_ball;
            let dphi_unit = -(qs[i].abs() / rs[i].powi(nm1)).powf(1.0 / (p - 1.0));
            let dphi_r = self.t0 * dphi_unit / r_ball;
            flux.push(y.powi(nm1) * dphi_r.abs().powf(p - 2.0) * dphi_r);
            rhs.push(0.5 * self.c0 * y.powi(nm1) * (self.t0 * phis[i]).powf(p - 1.0));
        }
        let sup_rhs = rhs.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        let mut nodes = Vec::with_capacity(n - 4);
        let mut res = Vec::with_capacity(n - 4);
        for j in 2..n - 2 {
            nodes.push(rs[j] * r_ball);
            res.push((-fd::d1_5pt(&flux, h, j) - rhs[j]) / sup_rhs);
        }
        Ok((nodes, res))
    }
}

// ---------------------------------------------------------------------------
// annulus barriers (fundamental / logarithmic)

/// p-harmonic radial profile on the annulus {R <= |x - x0| <= 4R}, equal to
/// C_H^{-1} u0 on the inner sphere and 0 on the outer one. For p < N it is
/// c(r^{-(N-p)/(p-1)} + k); for p = N it is c(k - ln r).
#[derive(Debug, Clone)]
pub struct AnnulusBarrier {
    n_dim: usize,
    p: f64,
    r_inner: f64,
    u0: f64,
    ch: f64,
    c: f64,
    k: f64,
}

pub fn build_annulus_barrier(n_dim: usize, p: f64, r: f64, u0: f64, ch: f64) -> Result<Barrier> {
    if !(p > 1.0) || p > n_dim as f64 {
        return Err(Error::Domain(format!(
            "need 1 < p <= N, got p = {p}, N = {n_dim}"
        )));
    }
    if !(r > 0.0) || !(u0 > 0.0) {
        return Err(Error::Domain(format!(
            "R and u0 must be positive, got R={r}, u0={u0}"
        )));
    }
    if !(ch > 1.0) {
        return Err(Error::Domain(format!("Harnack constant must be > 1, got {ch}")));
    }
    let (c, k) = if p < n_dim as f64 {
        let m = (n_dim as f64 - p) / (p - 1.0);
        let c = u0 / ch * (4.0 * r).powf(m) / (4.0f64.powf(m) - 1.0);
        (c, -(4.0 * r).powf(-m))
    } else {
        (u0 / ch / 4.0f64.ln(), (4.0 * r).ln())
    };
    Ok(Barrier::Annulus(AnnulusBarrier {
        n_dim,
        p,
        r_inner: r,
        u0,
        ch,
        c,
        k,
    }))
}

impl AnnulusBarrier {
    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn u0(&self) -> f64 {
        self.u0
    }

    pub fn ch(&self) -> f64 {
        self.ch
    }

    /// Value at distance `r` from the center.
    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(self.r_inner..=4.0 * self.r_inner * (1.0 + 1e-12)).contains(&r) {
            return Err(Error::Range(format!(
                "r = {r} outside annulus [{}, {}]",
                self.r_inner,
                4.0 * self.r_inner
            )));
        }
        if self.p < self.n_dim as f64 {
            let m = (self.n_dim as f64 - self.p) / (self.p - 1.0);
            Ok(self.c * (r.powf(-m) + self.k))
        } else {
            Ok(self.c * (self.k - r.ln()))
        }
    }

    /// Radial flux r^{N-1}|v'|^{p-2}v' from closed-form derivatives; constant
    /// in r exactly when the profile is p-harmonic.
    pub fn radial_flux(&self, r: f64) -> f64 {
        let vp = if self.p < self.n_dim as f64 {
            let m = (self.n_dim as f64 - self.p) / (self.p - 1.0);
            -self.c * m * r.powf(-m - 1.0)
        } else {
            -self.c / r
        };
        r.powi((self.n_dim - 1) as i32) * vp.abs().powf(self.p - 2.0) * vp
    }

    /// Discrete p-Laplacian from values only (no closed-form derivatives):
    /// staggered flux differences at step 1e-3 R. Absolute defect; the
    /// p-harmonic claim makes the right side exactly zero.
    fn residuals(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = 1e-3 * self.r_inner;
        let nm1 = (self.n_dim - 1) as i32;
        let lo = 1.05 * self.r_inner;
        let hi = 3.95 * self.r_inner;
        let mut nodes = Vec::with_capacity(n);
        let mut res = Vec::with_capacity(n);
        for i in 0..n {
            let r = lo + (hi - lo) * i as f64 / (n - 1) as f64;
            let grad = |rm: f64| -> Result<f64> {
                Ok((self.eval(rm + 0.5 * h)? - self.eval(rm - 0.5 * h)?) / h)
            };
            let flux = |rm: f64| -> Result<f64> {
                let g = grad(rm)?;
                Ok(rm.powi(nm1) * g.abs().powf(self.p - 2.0) * g)
            };
            let div = (flux(r + 0.5 * h)? - flux(r - 0.5 * h)?) / (h * r.powi(nm1));
            nodes.push(r);
            res.push(-div);
        }
        Ok((nodes, res))
    }
}

// ---------------------------------------------------------------------------
// shifted multiples of v_0

/// v_{s,eps}(x) = s v_0(x_N + eps), solving
/// -Delta_p v = s^{gamma+p-1} v^{-gamma}; strictly positive on the closed
/// strip once eps > 0.
#[derive(Debug, Clone)]
pub struct V0ShiftBarrier {
    params: Params,
    s: f64,
    epsilon: f64,
}

pub fn build_v0_shift(params: &Params, s: f64, epsilon: f64) -> Result<Barrier> {
    if params.gamma() <= 1.0 {
        return Err(Error::Nonexistence(format!(
            "gamma = {} <= 1: no half-line profile to shift",
            params.gamma()
        )));
    }
    if !(s > 0.0) || !(epsilon >= 0.0) {
        return Err(Error::Domain(format!(
            "need s > 0 and epsilon >= 0, got s={s}, epsilon={epsilon}"
        )));
    }
    Ok(Barrier::V0Shift(V0ShiftBarrier {
        params: params.clone(),
        s,
        epsilon,
    }))
}

impl V0ShiftBarrier {
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Coefficient s^{gamma+p-1} of the solved equation.
    pub fn rhs_coefficient(&self) -> f64 {
        self.s.powf(self.params.gamma() + self.params.p() - 1.0)
    }

    pub fn eval(&self, x_n: f64) -> Result<f64> {
        if !(x_n >= 0.0) {
            return Err(Error::Range(format!("x_N = {x_n} is negative")));
        }
        Ok(self.s * exact1d::eval_v0(&self.params, x_n + self.epsilon)?)
    }

    pub fn eval_prime(&self, x_n: f64) -> Result<f64> {
        if !(x_n >= 0.0) {
            return Err(Error::Range(format!("x_N = {x_n} is negative")));
        }
        Ok(self.s * exact1d::eval_v0_prime(&self.params, x_n + self.epsilon)?)
    }

    /// Pointwise-relative defect of -((v')^{p-1})' = s^{gamma+p-1} v^{-gamma}
    /// on a log grid over x_N in [1e-6, 10]; the log abscissa keeps the
    /// stencil uniformly accurate through the eps = 0 boundary layer.
    fn residuals(&self, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        let (ts, h) = fd::log_grid(1e-6, 10.0, n);
        let p = self.params.p();
        let gamma = self.params.gamma();
        let coeff = self.rhs_coefficient();
        let mut qs = Vec::with_capacity(n);
        let mut rhs = Vec::with_capacity(n);
        for &t in &ts {
            qs.push(self.eval_prime(t)?.powf(p - 1.0));
            rhs.push(coeff * self.eval(t)?.powf(-gamma));
        }
        let mut nodes = Vec::with_capacity(n - 4);
        let mut res = Vec::with_capacity(n - 4);
        for j in 2..n - 2 {
            nodes.push(ts[j]);
            res.push((-fd::d1_5pt(&qs, h, j) / ts[j] - rhs[j]) / rhs[j]);
        }
        Ok((nodes, res))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen_radial::solve_eigen;
    use crate::num::ode::OdeOptions;

    #[test]
    fn wmu_fixture_monotone_and_validates() {
        let b = build_wmu(2.0, 1.0, 1.0, 2.0, &FnSpec::Zero).unwrap();
        let Barrier::WMu(w) = &b else { panic!() };
        assert_eq!(w.eval(0.0).unwrap().0, 0.0);
        let mut prev = -1.0;
        for k in 0..=200 {
            let t = w.t_max() * k as f64 / 200.0;
            let (val, slope) = w.eval(t).unwrap();
            assert!(val > prev, "not strictly increasing at t={t}");
            assert!(slope > 0.0);
            prev = val;
        }
        // 2048 probe nodes: q has large fifth derivatives just past the
        // blend region, and the stencil needs the finer step there.
        let rep = validate_barrier(&b, 2048).unwrap();
        assert!(
            rep.worst < 1e-6,
            "worst residual {:.3e} at t = {}",
            rep.worst,
            rep.worst_node
        );
    }

    #[test]
    fn wmu_matches_independent_rk_integration() {
        // Oracle: integrate w' = c_p (mu - H(w))^{1/p} with the adaptive RK
        // scheme; the quadrature table never enters.
        let b = build_wmu(2.0, 1.0, 1.0, 2.0, &FnSpec::Zero).unwrap();
        let Barrier::WMu(w) = &b else { panic!() };
        let cp = exact1d::c_p(2.0);
        let f = |_t: f64, y: &[f64; 1]| [cp * (w.mu() - w.maj.big_h(y[0])).powf(0.5)];
        let opts = OdeOptions::default();
        let mut state = [0.0f64];
        let mut t_prev = 0.0;
        for k in 1..=20 {
            let t = 9.5 * k as f64 / 20.0;
            state = crate::num::ode::integrate(&f, t_prev, t, state, &opts, |_, _| {}).unwrap();
            t_prev = t;
            let (val, _) = w.eval(t).unwrap();
            assert!(
                (val - state[0]).abs() < 1e-7,
                "t={t}: quadrature {val} vs RK {}",
                state[0]
            );
        }
    }

    #[test]
    fn wmu_grows_pointwise_with_mu() {
        let mus = [1.0, 2.0, 10.0];
        let bs: Vec<_> = mus
            .iter()
            .map(|&mu| build_wmu(2.0, 1.0, 1.0, mu, &FnSpec::Zero).unwrap())
            .collect();
        for k in 1..=50 {
            let t = 9.0 * k as f64 / 50.0;
            let mut prev = 0.0;
            for b in &bs {
                let Barrier::WMu(w) = b else { panic!() };
                let (val, _) = w.eval(t).unwrap();
                assert!(val > prev, "w_mu not growing in mu at t={t}");
                prev = val;
            }
        }
    }

    #[test]
    fn wmu_rejects_small_mu_and_failed_domination() {
        assert!(matches!(
            build_wmu(2.0, 1.0, 1.0, 0.5, &FnSpec::Zero),
            Err(Error::Domain(_))
        ));
        // A large constant f exceeds the c/t^2 tail target at rho, so the
        // blend must dip below f somewhere.
        assert!(matches!(
            build_wmu(2.0, 1.0, 1.0, 100.0, &FnSpec::Constant(50.0)),
            Err(Error::Domination(_))
        ));
    }

    #[test]
    fn eigen_power_selects_s_and_validates() {
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let b = build_eigen_power(&params, 1.0, 0.5, &pair).unwrap();
        let Barrier::EigenPower(ep) = &b else { panic!() };
        // center value and sup alpha pin the two selection rules
        assert!((ep.eval(0.0).unwrap() - ep.s()).abs() < 1e-14);
        let sup = ep.sup_alpha().unwrap();
        assert!(sup <= 1.0 + 1e-12 && sup > 1.0 - 1e-10, "sup alpha {sup}");
        let w0 = ep.eval(0.0).unwrap();
        assert!((ep.r0().powf(params.beta_u()) * w0 - 0.5).abs() < 1e-12);
        let rep = validate_barrier(&b, 512).unwrap();
        assert!(rep.worst < 1e-5, "worst residual {:.3e}", rep.worst);
    }

    #[test]
    fn eigen_power_alpha_matches_direct_evaluation() {
        // Oracle: evaluate the printed alpha formula independently on the
        // eigen grid and compare against the barrier's claimed coefficient
        // recovered as (-Delta_p w) w^gamma via finite differences.
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let b = build_eigen_power(&params, 1.0, 0.5, &pair).unwrap();
        let Barrier::EigenPower(ep) = &b else { panic!() };
        // Fresh integrated phi samples, not the interpolant: second
        // derivatives of a monotone-cubic fit are too rough to probe with.
        let h = 5e-3;
        let beta = params.beta_u();
        for &r in &[0.3, 0.5, 0.7] {
            let (_, phis, _) = pair.samples_on(r - h, r + h, 3).unwrap();
            let ws: Vec<f64> = phis.iter().map(|&phi| ep.s() * phi.powf(beta)).collect();
            let d1 = (ws[2] - ws[0]) / (2.0 * h);
            let d2 = (ws[2] - 2.0 * ws[1] + ws[0]) / (h * h);
            // radial -Delta_p w for p=2, N=2: -(w'' + w'/r)
            let lhs = -(d2 + d1 / r);
            let want = ep.alpha(r).unwrap() * ws[1].powf(-3.0);
            assert!(
                (lhs - want).abs() / want.abs() < 1e-3,
                "r={r}: FD {lhs} vs alpha-based {want}"
            );
        }
    }

    #[test]
    fn eigen_power_rejects_mismatched_pair() {
        let pair = solve_eigen(2, 2.0, 1e-8).unwrap();
        let params = Params::new(2.0, 3.0, 3).unwrap();
        assert!(matches!(
            build_eigen_power(&params, 1.0, 0.5, &pair),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn linear_lower_radius_formula() {
        let params2 = Params::new(2.0, 3.0, 2).unwrap();
        let pair2 = solve_eigen(2, 2.0, 1e-10).unwrap();
        let b = build_linear_lower(&params2, 1.0, 1.0, &pair2).unwrap();
        let Barrier::LinearLower(ll) = &b else { panic!() };
        assert!((ll.r_ball() - (2.0 * pair2.lambda1()).sqrt()).abs() < 1e-12);
        // the rescaled eigenvalue must be exactly c0/2
        assert!((pair2.lambda_for_radius(ll.r_ball()) - 0.5).abs() < 1e-12);

        let params3 = Params::new(3.0, 2.0, 2).unwrap();
        let pair3 = solve_eigen(2, 3.0, 1e-10).unwrap();
        let b3 = build_linear_lower(&params3, 1.0, 1.0, &pair3).unwrap();
        let Barrier::LinearLower(ll3) = &b3 else { panic!() };
        assert!((ll3.r_ball() - (2.0 * pair3.lambda1()).powf(1.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn linear_lower_plateau_slope_and_validation() {
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        let b = build_linear_lower(&params, 1.0, 1.0, &pair).unwrap();
        let Barrier::LinearLower(ll) = &b else { panic!() };
        assert_eq!(ll.eval(ll.r_ball()).unwrap(), ll.t0());
        assert_eq!(ll.eval(ll.r_ball() * 3.0).unwrap(), ll.t0());
        let delta = 1e-4;
        let fd_slope = ll.eval(delta).unwrap() / delta;
        assert!(
            (fd_slope - ll.slope()).abs() / ll.slope() < 1e-3,
            "FD slope {fd_slope} vs C {}",
            ll.slope()
        );
        let rep = validate_barrier(&b, 512).unwrap();
        assert!(rep.worst < 1e-5, "worst residual {:.3e}", rep.worst);
    }

    #[test]
    fn linear_lower_rejects_weak_nonlinearity() {
        // f(t) = t^{-3} stays below c0 t^{p-1} near t0 when c0 is huge.
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let pair = solve_eigen(2, 2.0, 1e-8).unwrap();
        assert!(matches!(
            build_linear_lower(&params, 1e4, 1.0, &pair),
            Err(Error::Domination(_))
        ));
    }

    #[test]
    fn annulus_fixture_constants_and_boundary_values() {
        let b = build_annulus_barrier(3, 2.0, 1.0, 1.0, 2.0).unwrap();
        let Barrier::Annulus(a) = &b else { panic!() };
        assert!((a.c() - 2.0 / 3.0).abs() < 1e-15);
        assert!((a.k() + 0.25).abs() < 1e-15);
        assert!((a.eval(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(a.eval(4.0).unwrap().abs() < 1e-15);
        let rep = validate_barrier(&b, 256).unwrap();
        assert!(rep.worst < 1e-5, "worst residual {:.3e}", rep.worst);
    }

    #[test]
    fn annulus_logarithmic_case() {
        let b = build_annulus_barrier(2, 2.0, 1.0, 1.0, 2.0).unwrap();
        let Barrier::Annulus(a) = &b else { panic!() };
        assert_eq!(b.kind(), BarrierKind::Logarithmic);
        assert!((a.eval(1.0).unwrap() - 0.5).abs() < 1e-15);
        assert!(a.eval(4.0).unwrap().abs() < 1e-15);
        let rep = validate_barrier(&b, 256).unwrap();
        assert!(rep.worst < 1e-5, "worst residual {:.3e}", rep.worst);
    }

    #[test]
    fn annulus_flux_is_constant() {
        // Radial flux form: r^{N-1}|v'|^{p-2}v' constant exactly when
        // (m+1)(p-1) = N-1; deviation is pure rounding.
        for (n_dim, p) in [(3usize, 2.0f64), (4, 2.5), (3, 3.0)] {
            let b = build_annulus_barrier(n_dim, p, 1.0, 1.0, 2.0).unwrap();
            let Barrier::Annulus(a) = &b else { panic!() };
            let f0 = a.radial_flux(1.5);
            for k in 0..=100 {
                let r = 1.0 + 3.0 * k as f64 / 100.0;
                assert!(
                    (a.radial_flux(r) - f0).abs() <= 1e-12 * f0.abs(),
                    "flux drifts at r={r} (N={n_dim}, p={p})"
                );
            }
        }
    }

    #[test]
    fn annulus_rejects_p_above_n() {
        assert!(matches!(
            build_annulus_barrier(2, 3.0, 1.0, 1.0, 2.0),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn v0_shift_reduces_to_v0_and_scales_rhs() {
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let b = build_v0_shift(&params, 1.0, 0.0).unwrap();
        let Barrier::V0Shift(v) = &b else { panic!() };
        for k in 0..=20 {
            let t = k as f64 / 2.0;
            assert_eq!(v.eval(t).unwrap(), exact1d::eval_v0(&params, t).unwrap());
        }
        let b2 = build_v0_shift(&params, 2.0, 0.0).unwrap();
        let Barrier::V0Shift(v2) = &b2 else { panic!() };
        assert!((v2.rhs_coefficient() - 16.0).abs() < 1e-12);
    }

    #[test]
    fn v0_shift_positive_on_closed_strip_when_shifted() {
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let b = build_v0_shift(&params, 1.5, 0.1).unwrap();
        let Barrier::V0Shift(v) = &b else { panic!() };
        assert!(v.eval(0.0).unwrap() > 0.0);
        let rep = validate_barrier(&b, 1024).unwrap();
        assert!(rep.worst < 1e-6, "worst residual {:.3e}", rep.worst);
    }

    #[test]
    fn v0_shift_rejects_subcritical_gamma() {
        let params = Params::new(2.0, 0.5, 2).unwrap();
        assert!(matches!(
            build_v0_shift(&params, 1.0, 0.0),
            Err(Error::Nonexistence(_))
        ));
    }

    #[test]
    fn every_kind_validates_below_gate() {
        let pair = solve_eigen(2, 2.0, 1e-10).unwrap();
        let params = Params::new(2.0, 3.0, 2).unwrap();
        let barriers = vec![
            build_wmu(2.0, 1.0, 1.0, 2.0, &FnSpec::Zero).unwrap(),
            build_eigen_power(&params, 1.0, 0.5, &pair).unwrap(),
            build_linear_lower(&params, 1.0, 1.0, &pair).unwrap(),
            build_annulus_barrier(3, 2.0, 1.0, 1.0, 2.0).unwrap(),
            build_annulus_barrier(2, 2.0, 1.0, 1.0, 2.0).unwrap(),
            build_v0_shift(&params, 2.0, 0.05).unwrap(),
        ];
        for b in &barriers {
            let rep = validate_barrier(b, 1024).unwrap();
            assert!(
                rep.worst < 1e-5,
                "{:?} worst residual {:.3e} at {}",
                b.kind(),
                rep.worst,
                rep.worst_node
            );
        }
    }
}
