//! The library's acceptance gate: fourteen numbered criteria, each reducing a
//! mathematical guarantee to a measured number with an explicit target and
//! tolerance.
//!
//! Every criterion reports one [`CriterionResult`] line; a criterion with
//! several sub-checks reports the one with the worst margin. Tolerances can be
//! scaled uniformly (`tol_scale`) for exploratory runs, but the defaults are
//! the contract: a red line here means the library does not do what it claims,
//! and the fix belongs in the implementation, never in the gate.

use std::collections::HashMap;

use crate::analysis;
use crate::barriers::{
    build_annulus_barrier, build_eigen_power, build_linear_lower, build_v0_shift, build_wmu,
    validate_barrier, Barrier,
};
use crate::eigen_radial::solve_eigen;
use crate::error::{Error, Result};
use crate::exact1d::{self, QuadratureSolution};
use crate::num::{fd, quad};
use crate::params::{FnSpec, Params};
use crate::strip::{self, Field2D, StripProblem, TopBc};

/// Seed for the randomized criteria when the caller does not supply one.
pub const DEFAULT_SEED: u64 = 1729;

/// (id, name) of every criterion, in run order.
pub const CRITERIA: [(&str, &str); 14] = [
    ("AC01", "closed_form_fixture"),
    ("AC02", "quadrature_energy_identity"),
    ("AC03", "scaling_family"),
    ("AC04", "asymptotic_slope"),
    ("AC05", "nonexistence_gamma_le_one"),
    ("AC06", "eigenvalue_oracles"),
    ("AC07", "barrier_validity"),
    ("AC08", "strip_solver_oracle"),
    ("AC09", "discrete_monotonicity"),
    ("AC10", "boundary_exponents"),
    ("AC11", "reflection_sliding"),
    ("AC12", "inversion_conformal_case"),
    ("AC13", "vector_inequality_constants"),
    ("AC14", "quotient_scanner"),
];

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: &'static str,
    pub name: &'static str,
    pub pass: bool,
    /// Measured value of the worst sub-check.
    pub measured: f64,
    pub target: f64,
    pub tolerance: f64,
    /// Empty on a clean run; carries the error text when a criterion could
    /// not even be evaluated (which is reported as a failure, not a skip).
    pub detail: String,
}

/// One line per criterion: id, status, measured, target, tolerance, name.
pub fn format_line(r: &CriterionResult) -> String {
    let status = if r.pass { "PASS" } else { "FAIL" };
    let mut line = format!(
        "{} {} measured={:.8e} target={:.8e} tolerance={:.8e} {}",
        r.id, status, r.measured, r.target, r.tolerance, r.name
    );
    if !r.detail.is_empty() {
        line.push_str(" error=");
        line.push_str(&r.detail);
    }
    line
}

/// Worst-margin accumulator: each sub-check contributes a dimensionless
/// margin (measured distance / tolerance); the largest one decides the
/// criterion and is the one reported.
struct Acc {
    id: &'static str,
    name: &'static str,
    scale: f64,
    count: usize,
    worst: f64,
    measured: f64,
    target: f64,
    tol: f64,
}

impl Acc {
    fn new(id: &'static str, name: &'static str, scale: f64) -> Acc {
        Acc {
            id,
            name,
            scale,
            count: 0,
            worst: f64::NEG_INFINITY,
            measured: f64::NAN,
            target: f64::NAN,
            tol: f64::NAN,
        }
    }

    fn push(&mut self, measured: f64, target: f64, tol: f64, margin: f64) {
        let margin = if margin.is_finite() { margin } else { f64::INFINITY };
        self.count += 1;
        if margin > self.worst {
            self.worst = margin;
            self.measured = measured;
            self.target = target;
            self.tol = tol;
        }
    }

    /// |measured - target| <= tol.
    fn within(&mut self, measured: f64, target: f64, tol: f64) {
        let tol = tol * self.scale;
        self.push(measured, target, tol, (measured - target).abs() / tol);
    }

    /// measured <= tol (residual-style, target 0).
    fn below(&mut self, measured: f64, tol: f64) {
        let tol = tol * self.scale;
        self.push(measured, 0.0, tol, (measured / tol).max(0.0));
    }

    /// measured >= target - tol.
    fn at_least(&mut self, measured: f64, target: f64, tol: f64) {
        let tol = tol * self.scale;
        self.push(measured, target, tol, ((target - measured) / tol).max(0.0));
    }

    /// measured <= target + tol.
    fn at_most(&mut self, measured: f64, target: f64, tol: f64) {
        let tol = tol * self.scale;
        self.push(measured, target, tol, ((measured - target) / tol).max(0.0));
    }

    fn finish(self) -> CriterionResult {
        let evaluated = self.count > 0 && self.worst.is_finite();
        CriterionResult {
            id: self.id,
            name: self.name,
            pass: evaluated && self.worst <= 1.0 + 1e-12,
            measured: self.measured,
            target: self.target,
            tolerance: self.tol,
            detail: String::new(),
        }
    }
}

/// The two parameter sets every PDE-level criterion runs on.
const PSETS: [(f64, f64); 2] = [(2.0, 3.0), (3.0, 2.0)];

fn pset(k: usize) -> Params {
    let (p, gamma) = PSETS[k];
    Params::new(p, gamma, 2).unwrap()
}

/// Lazily solved shared state: quadrature tables and strip fields are
/// expensive enough that criteria 8-11 share them instead of re-solving.
#[derive(Default)]
struct Ctx {
    vms: HashMap<usize, QuadratureSolution>,
    fields: HashMap<(usize, bool), Field2D>,
}

impl Ctx {
    fn vm(&mut self, k: usize) -> Result<&QuadratureSolution> {
        if !self.vms.contains_key(&k) {
            let sol = exact1d::build_vm(&pset(k), 1.0, 2.5)?;
            self.vms.insert(k, sol);
        }
        Ok(&self.vms[&k])
    }

    /// Strip solve with level-1 quadrature top data on the two pinned
    /// meshes: 64x128 (coarse) or 128x256 (fine). The positive-level profile is the
    /// right oracle here because it carries genuine truncation error; the
    /// zero-level profile is reproduced to rounding by the fitted scheme and
    /// would make refinement ratios meaningless.
    fn field(&mut self, k: usize, fine: bool) -> Result<&Field2D> {
        if !self.fields.contains_key(&(k, fine)) {
            let top = self.vm(k)?.eval(1.0)?.0;
            let (nx, ny) = if fine { (128, 256) } else { (64, 128) };
            let problem = StripProblem::with_default_mesh(
                pset(k),
                1.0,
                1.0,
                nx,
                ny,
                TopBc::DirichletConst { value: top },
            )?;
            let field = strip::solve(&problem)?;
            self.fields.insert((k, fine), field);
        }
        Ok(&self.fields[&(k, fine)])
    }

    /// Relative sup-norm error of the solved field against the quadrature
    /// profile, over all interior rows (columns are identical for
    /// x'-independent data; column 0 is checked).
    fn field_error(&mut self, k: usize, fine: bool) -> Result<f64> {
        self.field(k, fine)?;
        let vm = &self.vms[&k];
        let field = &self.fields[&(k, fine)];
        let mut err = 0.0f64;
        for j in 1..=field.ny() {
            let y = field.ys()[j];
            let (v, _) = vm.eval(y)?;
            err = err.max((field.value(0, j) - v).abs() / v);
        }
        Ok(err)
    }
}

fn ac01(acc: &mut Acc) -> Result<()> {
    let params = Params::new(2.0, 3.0, 2)?;
    acc.within(exact1d::eval_v0(&params, 1.0)?, 2f64.sqrt(), 1e-12);
    // Finite-difference flux-form defect of the closed form on a 2048-point
    // log-graded grid spanning the boundary layer and the far field.
    let pm1 = params.p() - 1.0;
    let gamma = params.gamma();
    let resid = fd::log_grid_flux_residual(
        |t| exact1d::eval_v0_prime(&params, t).unwrap().powf(pm1),
        |t| exact1d::eval_v0(&params, t).unwrap().powf(-gamma),
        1e-4,
        10.0,
        2048,
    );
    acc.below(resid, 1e-6);
    Ok(())
}

fn ac02(acc: &mut Acc) -> Result<()> {
    for &(p, gamma) in &[(2.0, 2.0), (2.0, 3.0), (3.0, 2.0), (3.0, 3.0)] {
        let params = Params::new(p, gamma, 2)?;
        let cp = exact1d::c_p(p);
        for &m in &[0.0, 0.5, 1.0, 4.0] {
            let sol = exact1d::build_vm(&params, m, 3.0)?;
            // Energy drift along evaluations between table nodes.
            for i in 1..=24 {
                let t = 3.0 * (i as f64 / 24.0).powi(3);
                let (v, vp) = sol.eval(t.max(1e-3))?;
                acc.below((exact1d::energy(&params, v, vp) - m).abs(), 1e-8);
            }
            // Independent double-exponential quadrature of the defining
            // identity at a spread of table nodes.
            let n = sol.ts().len() - 1;
            for &j in &[1usize, 7, n / 4, n / 2, n] {
                let f = quad::tanh_sinh(
                    &|s: f64| (m + s.powf(1.0 - gamma) / (gamma - 1.0)).powf(-1.0 / p),
                    0.0,
                    sol.vs()[j],
                    1e-14,
                );
                acc.below((f - cp * sol.ts()[j]).abs(), 1e-10);
            }
        }
    }
    Ok(())
}

fn ac03(acc: &mut Acc, ctx: &mut Ctx) -> Result<()> {
    for k in 0..PSETS.len() {
        ctx.vm(k)?;
        let sol1 = &ctx.vms[&k];
        let params = pset(k);
        for &lambda in &[0.5, 2.0, 5.0] {
            let mapped = exact1d::scaling_map(sol1, lambda)?;
            let direct = exact1d::build_vm(&params, mapped.m(), mapped.t_max() * 1.001)?;
            let stride = (mapped.ts().len() / 160).max(1);
            for (idx, (&t, &v)) in mapped.ts().iter().zip(mapped.vs()).enumerate() {
                if idx % stride != 0 || t == 0.0 {
                    continue;
                }
                let (vd, _) = direct.eval(t)?;
                acc.below((v - vd).abs(), 1e-8);
            }
        }
    }
    Ok(())
}

fn ac04(acc: &mut Acc) -> Result<()> {
    // gamma = 3 for both p: the approach to the far-field slope is governed
    // by the intrinsic correction ~ v^{1-gamma}/((gamma-1) p M), which at
    // t = 100 sits near 1e-4 for gamma = 3 but above 1e-2 for gamma = 2 at
    // M = 0.25. The criterion fixes t and the tolerance but not gamma, so it
    // is a statement about parameters where the limit has set in.
    for &p in &[2.0, 3.0] {
        let params = Params::new(p, 3.0, 2)?;
        for &m in &[0.25, 1.0, 4.0] {
            let sol = exact1d::build_vm(&params, m, 101.0)?;
            let (_, vp) = sol.eval(100.0)?;
            acc.within(vp, exact1d::asymptotic_slope(&params, m), 1e-3);
        }
    }
    Ok(())
}

fn ac05(acc: &mut Acc) -> Result<()> {
    let mut good = 0usize;
    let mut total = 0usize;
    for &gamma in &[0.5, 1.0] {
        let params = Params::new(2.0, gamma, 2)?;
        total += 2;
        if matches!(exact1d::build_vm(&params, 1.0, 5.0), Err(Error::Nonexistence(_))) {
            good += 1;
        }
        if matches!(
            exact1d::nonexistence_diagnostic(&params),
            exact1d::ExistenceReport::Nonexistent { .. }
        ) {
            good += 1;
        }
    }
    acc.within(good as f64 / total as f64, 1.0, 1e-12);
    Ok(())
}

fn ac06(acc: &mut Acc) -> Result<()> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    acc.within(solve_eigen(1, 2.0, 1e-10)?.lambda1(), half_pi * half_pi, 1e-4);
    acc.within(solve_eigen(2, 2.0, 1e-10)?.lambda1(), 5.78319, 1e-3);
    acc.within(
        solve_eigen(3, 2.0, 1e-10)?.lambda1(),
        std::f64::consts::PI.powi(2),
        1e-3,
    );
    Ok(())
}

fn ac07(acc: &mut Acc) -> Result<()> {
    let pair = solve_eigen(2, 2.0, 1e-10)?;
    let params = Params::new(2.0, 3.0, 2)?;
    let barriers = vec![
        build_wmu(2.0, 1.0, 1.0, 2.0, &FnSpec::Zero)?,
        build_eigen_power(&params, 1.0, 0.5, &pair)?,
        build_linear_lower(&params, 1.0, 1.0, &pair)?,
        build_annulus_barrier(3, 2.0, 1.0, 1.0, 2.0)?,
        build_annulus_barrier(2, 2.0, 1.0, 1.0, 2.0)?,
        build_v0_shift(&params, 2.0, 0.05)?,
    ];
    for b in &barriers {
        acc.below(validate_barrier(b, 1024)?.worst, 1e-5);
        if let Barrier::Annulus(a) = b {
            // Boundary values are part of the construction, not approximated.
            acc.within(a.eval(1.0)?, a.u0() / a.ch(), 1e-12);
            acc.within(a.eval(4.0)?, 0.0, 1e-12);
        }
    }
    Ok(())
}

fn ac08(acc: &mut Acc, ctx: &mut Ctx) -> Result<()> {
    for k in 0..PSETS.len() {
        let coarse = ctx.field_error(k, false)?;
        let fine = ctx.field_error(k, true)?;
        acc.below(fine, 1e-3);
        // Observed order under 2x refinement. The leading error term is the
        // first-cell defect against the non-power correction of the profile,
        // which is exactly first order on the proportionally graded mesh, so
        // the observed order approaches 1 from below; the slack absorbs the
        // O(1e-2) transient of that limit, nothing more.
        acc.at_least((coarse / fine).log2(), 1.0, 0.02);
    }
    Ok(())
}

fn ac09(acc: &mut Acc, ctx: &mut Ctx) -> Result<()> {
    for k in 0..PSETS.len() {
        for &fine in &[false, true] {
            let min_quot = strip::monotonicity_check(ctx.field(k, fine)?);
            acc.at_least(min_quot, 0.0, 1e-10);
        }
    }
    Ok(())
}

fn ac10(acc: &mut Acc, ctx: &mut Ctx) -> Result<()> {
    for k in 0..PSETS.len() {
        let params = pset(k);
        let field = ctx.field(k, true)?;
        let window = (5.0 * field.ys()[1], 0.05);
        let samples: Vec<(f64, f64)> = (1..field.ny())
            .map(|j| (field.ys()[j], field.value(0, j)))
            .collect();
        let ufit = analysis::fit_exponent(&samples, window)?;
        acc.within(ufit.exponent, params.beta_u(), 0.02);
        let scans =
            analysis::gradient_blowup_scan(field, params.beta_u(), &[(0.0, 1.0)], Some(window))?;
        acc.within(scans[0].fit.exponent, params.beta_grad(), 0.05);
    }
    Ok(())
}

fn ac11(acc: &mut Acc, ctx: &mut Ctx) -> Result<()> {
    for k in 0..PSETS.len() {
        let field = ctx.field(k, true)?;
        for &lam in &[0.1, 0.25] {
            acc.below(strip::reflection_compare(field, lam)?, 1e-8);
            acc.below(strip::sliding_compare(field, (0.0, 1.0), lam)?, 1e-8);
        }
    }
    Ok(())
}

fn ac12(acc: &mut Acc) -> Result<()> {
    let mut pts = Vec::new();
    for i in 0..15 {
        for k in 0..15 {
            let r = 0.8 + 0.8 * i as f64 / 14.0;
            let th = std::f64::consts::PI * (1.0 / 6.0 + (2.0 / 3.0) * k as f64 / 14.0);
            pts.push((r * th.cos(), r * th.sin()));
        }
    }
    // Harmonic pair: x2 and its inversion x2/|x|^2.
    let mut worst_harm = 0.0f64;
    let mut worst_inv = 0.0f64;
    for &(x, y) in &pts {
        let lap = analysis::laplacian2_fd(
            &|a, b| {
                let s = a * a + b * b;
                b / s
            },
            x,
            y,
            1e-3,
        );
        worst_harm = worst_harm.max(lap.abs());
        let q = analysis::kelvin_point(analysis::kelvin_point((x, y))?)?;
        worst_inv = worst_inv.max((q.0 - x).abs().max((q.1 - y).abs()));
    }
    acc.below(worst_harm, 1e-8);
    acc.below(worst_inv, 1e-12);
    // The inverted zero-level profile solves the |x|^{-2N}-weighted equation.
    let params = Params::new(2.0, 3.0, 2)?;
    let u = |_x: f64, y: f64| 2f64.sqrt() * y.sqrt();
    acc.below(analysis::kelvin_residual(&params, &u, &pts, 1e-3)?, 1e-4);
    Ok(())
}

fn ac13(acc: &mut Acc, seed: u64) -> Result<()> {
    for (i, &p) in [1.5f64, 2.0, 3.0, 4.0].iter().enumerate() {
        let (e1, e2) = analysis::estimate_ineq_constants(p, 2, 100_000, seed + i as u64)?;
        if p == 2.0 {
            acc.within(e1, 1.0, 1e-12);
            acc.within(e2, 1.0, 1e-12);
        } else {
            // The dense sweep brackets the sharp constants; the random pairs
            // must respect them up to grid resolution, i.e. the inequalities
            // hold on every sampled pair with the swept constants.
            let (s1, s2) = analysis::sweep_ineq_constants(p, 481, 481);
            acc.at_least(e1 / s1, 1.0, 0.05);
            acc.at_most(e2 / s2, 1.0, 0.05);
        }
    }
    Ok(())
}

fn ac14(acc: &mut Acc) -> Result<()> {
    let lin = FnSpec::Linear { slope: -1.0, intercept: 2.0 };
    acc.within(analysis::decreasing_quotient_sup(&lin, 0.0, 1.0, 0.25)?, -1.0, 1e-12);
    let inv = FnSpec::NegPower { coeff: 1.0, exponent: 1.0 };
    acc.within(
        analysis::decreasing_quotient_sup(&inv, 0.5, 1.5, 0.5)?,
        -2.0 / 3.0,
        1e-6,
    );
    let pw = FnSpec::NegPower { coeff: 1.0, exponent: 3.0 };
    acc.at_most(analysis::decreasing_quotient_sup(&pw, 0.5, 1.5, 0.5)?, -1e-3, 0.0);
    // Plateau of width 1.5 eps: strict decrease fails, sup is exactly 0.
    let plat = FnSpec::Tabulated {
        ts: vec![0.0, 0.4, 0.7, 1.0],
        vals: vec![1.0, 0.8, 0.8, 0.5],
        lipschitz: 2.0,
    };
    acc.within(analysis::decreasing_quotient_sup(&plat, 0.0, 1.0, 0.2)?, 0.0, 1e-12);
    Ok(())
}

fn run_with_ctx(
    ctx: &mut Ctx,
    idx: usize,
    tol_scale: f64,
    seed: u64,
) -> CriterionResult {
    let (id, name) = CRITERIA[idx];
    let mut acc = Acc::new(id, name, tol_scale);
    let outcome = match idx {
        0 => ac01(&mut acc),
        1 => ac02(&mut acc),
        2 => ac03(&mut acc, ctx),
        3 => ac04(&mut acc),
        4 => ac05(&mut acc),
        5 => ac06(&mut acc),
        6 => ac07(&mut acc),
        7 => ac08(&mut acc, ctx),
        8 => ac09(&mut acc, ctx),
        9 => ac10(&mut acc, ctx),
        10 => ac11(&mut acc, ctx),
        11 => ac12(&mut acc),
        12 => ac13(&mut acc, seed),
        13 => ac14(&mut acc),
        _ => unreachable!(),
    };
    match outcome {
        Ok(()) => acc.finish(),
        Err(e) => {
            let mut r = acc.finish();
            r.pass = false;
            r.detail = e.to_string();
            r
        }
    }
}

/// Runs every criterion in order. `tol_scale` multiplies every tolerance
/// (1.0 is the contract); `seed` feeds the randomized criteria.
pub fn run_all(tol_scale: f64, seed: u64) -> Vec<CriterionResult> {
    let mut ctx = Ctx::default();
    (0..CRITERIA.len())
        .map(|i| run_with_ctx(&mut ctx, i, tol_scale, seed))
        .collect()
}

/// Runs a single criterion by id ("AC01".."AC14"); unknown ids are a Config
/// error listing the valid ones.
pub fn run_one(id: &str, tol_scale: f64, seed: u64) -> Result<CriterionResult> {
    let idx = CRITERIA
        .iter()
        .position(|(cid, _)| cid.eq_ignore_ascii_case(id))
        .ok_or_else(|| {
            Error::Config(format!(
                "unknown criterion id {id}; valid ids are AC01..AC{:02}",
                CRITERIA.len()
            ))
        })?;
    let mut ctx = Ctx::default();
    Ok(run_with_ctx(&mut ctx, idx, tol_scale, seed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_id_is_rejected_with_the_valid_range() {
        let err = run_one("AC99", 1.0, DEFAULT_SEED).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(err.to_string().contains("AC14"));
    }

    #[test]
    fn single_criterion_runs_and_formats() {
        let r = run_one("ac14", 1.0, DEFAULT_SEED).unwrap();
        assert!(r.pass, "{}", format_line(&r));
        let line = format_line(&r);
        assert!(line.starts_with("AC14 PASS measured="));
        assert!(line.contains("quotient_scanner"));
    }

    #[test]
    fn tolerance_scale_reaches_the_gate() {
        // A hostile tolerance scale must flip criteria to FAIL; this pins
        // that tol_scale really multiplies the gates rather than being
        // decorative.
        let r = run_one("AC01", 1e-16, DEFAULT_SEED).unwrap();
        assert!(!r.pass);
    }
}
