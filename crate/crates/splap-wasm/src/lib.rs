//! Thin JSON bindings over the core solvers for the browser demo.
//!
//! Each export takes plain numbers, runs the same code paths as the CLI, and
//! returns a JSON string the page can feed straight into canvas plots. All
//! numeric work stays in the core crate; this layer only resamples onto
//! display grids and serializes.

use serde_json::json;
use splap_core::error::Error;
use splap_core::params::{FnSpec, Params};
use splap_core::strip::{StripProblem, TopBc};
use splap_core::{analysis, eigen_radial, exact1d, strip};
use wasm_bindgen::prelude::*;

fn err_string(e: Error) -> String {
    e.to_string()
}

/// Tabulates the half-line profile v_M on a uniform display grid, together
/// with the reference power law for the zero level and the far-field slope.
fn profile_json(p: f64, gamma: f64, m: f64, t_max: f64, n: usize) -> Result<String, String> {
    if !(t_max > 0.0) || !(8..=10_000).contains(&n) {
        return Err("need t_max > 0 and 8 <= n <= 10000".into());
    }
    let params = Params::new(p, gamma, 1).map_err(err_string)?;
    let sol = exact1d::build_vm(&params, m, t_max).map_err(err_string)?;
    let mut ts = Vec::with_capacity(n + 1);
    let mut vs = Vec::with_capacity(n + 1);
    let mut vps = Vec::with_capacity(n);
    ts.push(0.0);
    vs.push(0.0);
    for i in 1..=n {
        let t = t_max * i as f64 / n as f64;
        let (v, vp) = sol.eval(t).map_err(err_string)?;
        ts.push(t);
        vs.push(v);
        vps.push(vp);
    }
    Ok(json!({
        "ts": ts,
        "vs": vs,
        "vps": vps,
        "slope": exact1d::asymptotic_slope(&params, m),
        "beta": params.beta_u(),
        "k": exact1d::v0_constant(&params).map_err(err_string)?,
    })
    .to_string())
}

/// Solves the periodic strip with profile data on the top (optionally
/// sinusoidally modulated) and returns the field plus the boundary-rate fit.
fn strip_json(
    p: f64,
    gamma: f64,
    lambda: f64,
    nx: usize,
    ny: usize,
    amp: f64,
) -> Result<String, String> {
    if !(4..=96).contains(&nx) || !(8..=192).contains(&ny) {
        return Err("need 4 <= nx <= 96 and 8 <= ny <= 192".into());
    }
    let params = Params::new(p, gamma, 2).map_err(err_string)?;
    let top = TopBc::DirichletV0 { s: 1.0, epsilon: 0.0 };
    let mut problem =
        StripProblem::with_default_mesh(params.clone(), lambda, 1.0, nx, ny, top)
            .map_err(err_string)?;
    if amp != 0.0 {
        let n = 256;
        let ts: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
        let vals: Vec<f64> =
            ts.iter().map(|&x| amp * (std::f64::consts::TAU * x).sin()).collect();
        let lipschitz = amp.abs() * std::f64::consts::TAU;
        problem = problem.with_perturbation(FnSpec::Tabulated { ts, vals, lipschitz });
    }
    let field = strip::solve(&problem).map_err(err_string)?;

    let mut u = Vec::with_capacity(field.ny() + 1);
    for j in 0..=field.ny() {
        let row: Vec<f64> = (0..field.nx()).map(|i| field.value(i, j)).collect();
        u.push(row);
    }
    let samples: Vec<(f64, f64)> = (1..field.ny())
        .map(|j| (field.ys()[j], field.value(0, j)))
        .collect();
    let fit = analysis::fit_exponent(&samples, analysis::default_fit_window(&field));
    let (exponent, constant) = match &fit {
        Ok(f) => (f.exponent, f.constant),
        Err(_) => (f64::NAN, f64::NAN),
    };
    Ok(json!({
        "xs": field.xs(),
        "ys": field.ys(),
        "u": u,
        "min_dudxn": strip::monotonicity_check(&field),
        "exponent": exponent,
        "constant": constant,
        "beta": params.beta_u(),
        "iterations": field.iterations(),
    })
    .to_string())
}

/// First radial eigenfunction of the weighted problem on the unit ball.
fn eigen_json(n_dim: usize, p: f64, n: usize) -> Result<String, String> {
    if !(8..=10_000).contains(&n) {
        return Err("need 8 <= n <= 10000".into());
    }
    let pair = eigen_radial::solve_eigen(n_dim, p, 1e-10).map_err(err_string)?;
    let (rs, phis, _) = pair.samples_on(0.0, 1.0, n).map_err(err_string)?;
    Ok(json!({
        "rs": rs,
        "phis": phis,
        "lambda1": pair.lambda1(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn profile(p: f64, gamma: f64, m: f64, t_max: f64, n: usize) -> Result<String, JsError> {
    profile_json(p, gamma, m, t_max, n).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn strip_solve(
    p: f64,
    gamma: f64,
    lambda: f64,
    nx: usize,
    ny: usize,
    amp: f64,
) -> Result<String, JsError> {
    strip_json(p, gamma, lambda, nx, ny, amp).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn eigenfunction(n_dim: usize, p: f64, n: usize) -> Result<String, JsError> {
    eigen_json(n_dim, p, n).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> serde_json::Value {
        serde_json::from_str(s).expect("valid JSON")
    }

    #[test]
    fn profile_payload_is_plottable_and_matches_the_closed_form() {
        let v = parse(&profile_json(2.0, 3.0, 0.0, 4.0, 64).unwrap());
        let ts = v["ts"].as_array().unwrap();
        let vs = v["vs"].as_array().unwrap();
        assert_eq!(ts.len(), 65);
        assert_eq!(vs.len(), 65);
        assert_eq!(v["vps"].as_array().unwrap().len(), 64);
        for (t, val) in ts.iter().zip(vs).skip(1) {
            let (t, val) = (t.as_f64().unwrap(), val.as_f64().unwrap());
            let exact = (2.0 * t).sqrt();
            assert!((val - exact).abs() <= 1e-8 * exact, "t={t}");
        }
        assert!((v["beta"].as_f64().unwrap() - 0.5).abs() < 1e-15);

        assert!(profile_json(2.0, 0.5, 0.0, 4.0, 64).is_err(), "nonexistent range");
        assert!(profile_json(2.0, 3.0, 0.0, -1.0, 64).is_err());
    }

    #[test]
    fn strip_payload_has_full_field_and_sane_fit() {
        let v = parse(&strip_json(2.0, 3.0, 1.0, 8, 32, 0.0).unwrap());
        let u = v["u"].as_array().unwrap();
        assert_eq!(u.len(), 33);
        assert_eq!(u[0].as_array().unwrap().len(), 8);
        assert!(v["min_dudxn"].as_f64().unwrap() >= -1e-10);
        let e = v["exponent"].as_f64().unwrap();
        assert!((e - 0.5).abs() < 0.1, "boundary rate {e}");

        // Modulated top data can locally break vertical monotonicity near the
        // lid (lateral inflow under a low spot); the diagnostic just has to
        // come back finite.
        let v = parse(&strip_json(2.0, 3.0, 1.0, 8, 32, 0.1).unwrap());
        assert!(v["min_dudxn"].as_f64().unwrap().is_finite());

        assert!(strip_json(2.0, 3.0, 1.0, 2, 32, 0.0).is_err(), "mesh caps");
    }

    #[test]
    fn eigen_payload_pins_the_known_eigenvalue() {
        let v = parse(&eigen_json(1, 2.0, 128).unwrap());
        let lam = v["lambda1"].as_f64().unwrap();
        let expect = (std::f64::consts::PI / 2.0).powi(2);
        assert!((lam - expect).abs() < 1e-4, "lambda1={lam}");
        assert_eq!(v["rs"].as_array().unwrap().len(), v["phis"].as_array().unwrap().len());
    }
}
