//! Adaptive embedded Runge-Kutta integration (Cash-Karp 4(5)).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 200_000,
        }
    }
}

/// Integrates y' = f(t, y) from t0 to t1 (t1 > t0), calling `record` after
/// every accepted step (including the initial state). Returns the final state.
pub fn integrate<const D: usize>(
    f: &impl Fn(f64, &[f64; D]) -> [f64; D],
    t0: f64,
    t1: f64,
    y0: [f64; D],
    opts: &OdeOptions,
    mut record: impl FnMut(f64, &[f64; D]),
) -> Result<[f64; D]> {
    const A2: f64 = 0.2;
    const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
    const A4: [f64; 3] = [0.3, -0.9, 1.2];
    const A5: [f64; 4] = [-11.0 / 54.0, 2.5, -70.0 / 27.0, 35.0 / 27.0];
    const A6: [f64; 5] = [
        1631.0 / 55296.0,
        175.0 / 512.0,
        575.0 / 13824.0,
        44275.0 / 110592.0,
        253.0 / 4096.0,
    ];
    const B5: [f64; 6] = [37.0 / 378.0, 0.0, 250.0 / 621.0, 125.0 / 594.0, 0.0, 512.0 / 1771.0];
    const B4: [f64; 6] = [
        2825.0 / 27648.0,
        0.0,
        18575.0 / 48384.0,
        13525.0 / 55296.0,
        277.0 / 14336.0,
        0.25,
    ];

    let mut t = t0;
    let mut y = y0;
    let mut h = (t1 - t0) / 100.0;
    record(t, &y);
    for _ in 0..opts.max_steps {
        if t >= t1 {
            return Ok(y);
        }
        if t + h > t1 {
            h = t1 - t;
        }
        let k1 = f(t, &y);
        let mut ytmp = [0.0; D];
        for i in 0..D {
            ytmp[i] = y[i] + h * A2 * k1[i];
        }
        let k2 = f(t + 0.2 * h, &ytmp);
        for i in 0..D {
            ytmp[i] = y[i] + h * (A3[0] * k1[i] + A3[1] * k2[i]);
        }
        let k3 = f(t + 0.3 * h, &ytmp);
        for i in 0..D {
            ytmp[i] = y[i] + h * (A4[0] * k1[i] + A4[1] * k2[i] + A4[2] * k3[i]);
        }
        let k4 = f(t + 0.6 * h, &ytmp);
        for i in 0..D {
            ytmp[i] = y[i] + h * (A5[0] * k1[i] + A5[1] * k2[i] + A5[2] * k3[i] + A5[3] * k4[i]);
        }
        let k5 = f(t + h, &ytmp);
        for i in 0..D {
            ytmp[i] = y[i]
                + h * (A6[0] * k1[i] + A6[1] * k2[i] + A6[2] * k3[i] + A6[3] * k4[i] + A6[4] * k5[i]);
        }
        let k6 = f(t + 0.875 * h, &ytmp);

        let ks = [k1, k2, k3, k4, k5, k6];
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..D {
            let mut hi5 = 0.0;
            let mut hi4 = 0.0;
            for s in 0..6 {
                hi5 += B5[s] * ks[s][i];
                hi4 += B4[s] * ks[s][i];
            }
            y5[i] += h * hi5;
            let scale = opts.atol + opts.rtol * y[i].abs().max(y5[i].abs());
            err = err.max((h * (hi5 - hi4)).abs() / scale);
        }

        if err <= 1.0 {
            t += h;
            y = y5;
            record(t, &y);
            let grow = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
            h *= grow.min(5.0);
        } else {
            h *= (0.9 * err.powf(-0.25)).max(0.1);
            if !h.is_finite() || h.abs() < 1e-15 * (1.0 + t.abs()) {
                return Err(Error::Domain(format!("step size underflow at t={t:.6e}")));
            }
        }
    }
    Err(Error::Domain(format!(
        "step budget exhausted at t={t:.6e} of [{t0:.3e}, {t1:.3e}]"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_harmonic_oscillator() {
        // y'' = -y, exact (cos t, -sin t) from (1, 0)
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let yf = integrate(&f, 0.0, 10.0, [1.0, 0.0], &OdeOptions::default(), |_, _| {}).unwrap();
        assert!((yf[0] - 10f64.cos()).abs() < 1e-8);
        assert!((yf[1] + 10f64.sin()).abs() < 1e-8);
    }

    #[test]
    fn records_monotone_time_points() {
        let f = |t: f64, _y: &[f64; 1]| [t.cos()];
        let mut prev = -1.0;
        integrate(&f, 0.0, 3.0, [0.0], &OdeOptions::default(), |t, _| {
            assert!(t > prev || t == 0.0);
            prev = t;
        })
        .unwrap();
        assert_eq!(prev, 3.0);
    }
}
