//! Bracketed scalar root refinement.

use crate::error::{Error, Result};

/// Finds the root of an increasing-through-zero function on [lo, hi] by
/// bisection with safeguarded Newton acceleration. `f_df` returns (f, f');
/// the Newton step is taken only while it stays inside the current bracket,
/// otherwise the step falls back to bisection. Requires f(lo) <= 0 <= f(hi).
pub fn bisect_newton(
    mut f_df: impl FnMut(f64) -> (f64, f64),
    mut lo: f64,
    mut hi: f64,
    xtol: f64,
    ftol: f64,
) -> Result<f64> {
    let (flo, _) = f_df(lo);
    let (fhi, _) = f_df(hi);
    if flo > 0.0 || fhi < 0.0 {
        return Err(Error::Domain(format!(
            "root not bracketed: f({lo:.6e})={flo:.3e}, f({hi:.6e})={fhi:.3e}"
        )));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, dfx) = f_df(x);
        if fx.abs() <= ftol {
            return Ok(x);
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= xtol * (1.0 + x.abs()) {
            return Ok(0.5 * (lo + hi));
        }
        let newton = x - fx / dfx;
        x = if dfx > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Err(Error::Quadrature(format!(
        "root refinement stalled on [{lo:.9e}, {hi:.9e}]"
    )))
}
