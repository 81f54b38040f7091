//! `splap`: profile tabulation, strip solves, and the acceptance suite from
//! one binary. Configuration is flat `key=value` pairs, from an optional file
//! plus command-line overrides (command line wins); every output is a CSV
//! with a mandatory header or a gnuplot script, so runs are diffable.

mod config;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use config::{parse_pair, KvConfig};
use splap_core::error::Error;
use splap_core::{acceptance, analysis, exact1d, strip};
use splap_core::params::{FnSpec, Params};
use splap_core::strip::{StripProblem, TopBc};

const USAGE: &str = "\
usage: splap <command> [config-file] [key=value ...]

commands:
  exact1d   tabulate half-line profiles v_M
            keys: p, gamma (required; comma lists sweep), M (list, default 0),
                  t_max (default 10), points, out_dir (default .)
  solve     solve the strip problem and dump the field
            keys: p, gamma (required), lambda, period (default 1), nx, ny
                  (default 64x128), grading, top (v0 | vm:<M> | const:<value>,
                  default v0), amp, freq (top-data modulation, default 0, 1),
                  out_dir (default .)
  check     run the acceptance criteria
            keys: tol_scale (default 1), seed, only (criterion id)
            flags: --list (print criterion ids without running)

exit codes: 0 success, 1 usage or config error, 2 mathematical nonexistence,
            3 solver failure, 4 acceptance-check failure
env: SPLAP_SEED overrides the configured seed";

fn main() {
    match run() {
        Ok(()) => {}
        Err((code, msg)) => {
            if !msg.is_empty() {
                eprintln!("{msg}");
            }
            std::process::exit(code);
        }
    }
}

type Failure = (i32, String);

fn usage_err(msg: impl Into<String>) -> Failure {
    let msg = msg.into();
    (1, if msg.is_empty() { USAGE.into() } else { format!("{msg}\n\n{USAGE}") })
}

/// Setup problems are usage errors; nonexistence and solver breakdown keep
/// their dedicated codes so scripts can branch on them.
fn core_err(e: Error) -> Failure {
    let code = match e {
        Error::Nonexistence(_) => 2,
        Error::Solve(_) | Error::Positivity(_) => 3,
        _ => 1,
    };
    (code, e.to_string())
}

fn run() -> Result<(), Failure> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let Some(command) = args.first() else {
        return Err(usage_err(""));
    };

    let mut config_path: Option<PathBuf> = None;
    let mut overrides: Vec<(String, String)> = Vec::new();
    let mut list_flag = false;
    for arg in &args[1..] {
        if arg == "--list" {
            list_flag = true;
        } else if arg.contains('=') {
            overrides.push(parse_pair(arg).map_err(usage_err)?);
        } else if config_path.is_none() {
            config_path = Some(PathBuf::from(arg));
        } else {
            return Err(usage_err(format!("unexpected argument `{arg}`")));
        }
    }
    let path = config_path.as_deref();

    match command.as_str() {
        "exact1d" => cmd_exact1d(path, &overrides),
        "solve" => cmd_solve(path, &overrides),
        "check" => cmd_check(path, &overrides, list_flag),
        other => Err(usage_err(format!("unknown command `{other}`"))),
    }
}

/// Stdout line that tolerates a closed pipe: `splap check | head` must end
/// the process quietly instead of panicking mid-write.
fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{line}").is_err() {
        std::process::exit(0);
    }
}

/// 17 significant digits: enough to round-trip any f64, fixed for diffing.
fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_file(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents)
        .map_err(|e| (1, format!("cannot write {}: {e}", path.display())))?;
    emit(&format!("wrote {}", path.display()));
    Ok(())
}

/// Display-formats a float for a file name (shortest round-trip form, so
/// p=2 gives "2" and p=1.5 gives "1.5").
fn name_num(x: f64) -> String {
    format!("{x}")
}

fn cmd_exact1d(path: Option<&Path>, overrides: &[(String, String)]) -> Result<(), Failure> {
    let cfg = KvConfig::load(
        path,
        overrides,
        &["p", "gamma", "M", "t_max", "points", "out_dir"],
    )
    .map_err(usage_err)?;
    if cfg.is_empty() {
        return Err(usage_err(""));
    }
    let ps = cfg.f64_list("p", true).map_err(usage_err)?;
    let gammas = cfg.f64_list("gamma", true).map_err(usage_err)?;
    let ms = {
        let list = cfg.f64_list("M", false).map_err(usage_err)?;
        if list.is_empty() { vec![0.0] } else { list }
    };
    let t_max = cfg.f64_or("t_max", 10.0).map_err(usage_err)?;
    let points = cfg.usize_or("points", 0).map_err(usage_err)?;
    let out_dir = PathBuf::from(cfg.str_or("out_dir", "."));

    for &p in &ps {
        for &gamma in &gammas {
            let params = Params::new(p, gamma, 1).map_err(core_err)?;
            for &m in &ms {
                let sol = if points == 0 {
                    exact1d::build_vm(&params, m, t_max)
                } else {
                    exact1d::build_vm_with(&params, m, t_max, points)
                }
                .map_err(|e| {
                    if matches!(e, Error::Nonexistence(_)) {
                        (2, format!("nonexistent (gamma<=1)\n{e}"))
                    } else {
                        core_err(e)
                    }
                })?;

                let mut csv = String::from("t,v,v_prime,energy_residual\n");
                for (&t, &v) in sol.ts().iter().zip(sol.vs()) {
                    if t == 0.0 {
                        // The origin anchor has v = 0 where v' and the energy
                        // are singular; tabulation starts at the first
                        // positive node.
                        continue;
                    }
                    let vp = sol.vprime_from_value(v);
                    let resid = exact1d::energy(&params, v, vp) - m;
                    let _ = writeln!(
                        csv,
                        "{},{},{},{}",
                        fmt17(t),
                        fmt17(v),
                        fmt17(vp),
                        fmt17(resid)
                    );
                }
                let name = format!(
                    "exact1d_p{}_gamma{}_M{}.csv",
                    name_num(p),
                    name_num(gamma),
                    name_num(m)
                );
                write_file(&out_dir.join(name), &csv)?;
            }
        }
    }
    Ok(())
}

fn parse_top(spec: &str, params: &Params, lambda: f64) -> Result<TopBc, Failure> {
    if spec == "v0" {
        return Ok(TopBc::DirichletV0 { s: 1.0, epsilon: 0.0 });
    }
    if let Some(m) = spec.strip_prefix("vm:") {
        let m: f64 = m
            .parse()
            .map_err(|_| usage_err(format!("key `top`: `{m}` is not a number")))?;
        let sol = exact1d::build_vm(params, m, lambda * 1.001).map_err(core_err)?;
        let value = sol.eval(lambda).map_err(core_err)?.0;
        return Ok(TopBc::DirichletConst { value });
    }
    if let Some(v) = spec.strip_prefix("const:") {
        let value: f64 = v
            .parse()
            .map_err(|_| usage_err(format!("key `top`: `{v}` is not a number")))?;
        return Ok(TopBc::DirichletConst { value });
    }
    Err(usage_err(format!(
        "key `top`: `{spec}` is not one of v0, vm:<M>, const:<value>"
    )))
}

fn cmd_solve(path: Option<&Path>, overrides: &[(String, String)]) -> Result<(), Failure> {
    let cfg = KvConfig::load(
        path,
        overrides,
        &[
            "p", "gamma", "lambda", "period", "nx", "ny", "grading", "top", "amp", "freq",
            "out_dir",
        ],
    )
    .map_err(usage_err)?;
    if cfg.is_empty() {
        return Err(usage_err(""));
    }
    let p: f64 = cfg
        .require("p")
        .and_then(|v| v.parse().map_err(|_| format!("key `p`: `{v}` is not a number")))
        .map_err(usage_err)?;
    let gamma: f64 = cfg
        .require("gamma")
        .and_then(|v| v.parse().map_err(|_| format!("key `gamma`: `{v}` is not a number")))
        .map_err(usage_err)?;
    let lambda = cfg.f64_or("lambda", 1.0).map_err(usage_err)?;
    let period = cfg.f64_or("period", 1.0).map_err(usage_err)?;
    let nx = cfg.usize_or("nx", 64).map_err(usage_err)?;
    let ny = cfg.usize_or("ny", 128).map_err(usage_err)?;
    let amp = cfg.f64_or("amp", 0.0).map_err(usage_err)?;
    let freq = cfg.f64_or("freq", 1.0).map_err(usage_err)?;
    let out_dir = PathBuf::from(cfg.str_or("out_dir", "."));

    let params = Params::new(p, gamma, 2).map_err(core_err)?;
    let top = parse_top(cfg.str_or("top", "v0"), &params, lambda)?;
    let mut problem = match cfg.get("grading") {
        None => StripProblem::with_default_mesh(params.clone(), lambda, period, nx, ny, top)
            .map_err(core_err)?,
        Some(g) => {
            let grading: f64 = g
                .parse()
                .map_err(|_| usage_err(format!("key `grading`: `{g}` is not a number")))?;
            let mesh = strip::MeshSpec::graded(nx, ny, grading);
            StripProblem::new(params.clone(), lambda, period, mesh, top).map_err(core_err)?
        }
    };
    if amp != 0.0 {
        // Multiplicative top modulation 1 + amp sin(2 pi freq x / period),
        // tabulated densely enough that interpolation error is negligible.
        let n = 512;
        let ts: Vec<f64> = (0..=n).map(|i| period * i as f64 / n as f64).collect();
        let vals: Vec<f64> = ts
            .iter()
            .map(|&x| amp * (std::f64::consts::TAU * freq * x / period).sin())
            .collect();
        let lipschitz = amp.abs() * std::f64::consts::TAU * freq / period;
        problem = problem.with_perturbation(FnSpec::Tabulated { ts, vals, lipschitz });
    }

    let field = strip::solve(&problem).map_err(core_err)?;

    let mut csv = String::from("x1,x2,u\n");
    for j in 0..=field.ny() {
        let y = field.ys()[j];
        for (i, &x) in field.xs().iter().enumerate() {
            let _ = writeln!(csv, "{},{},{}", fmt17(x), fmt17(y), fmt17(field.value(i, j)));
        }
    }
    let stem = format!(
        "solve_p{}_gamma{}_{}x{}",
        name_num(p),
        name_num(gamma),
        nx,
        ny
    );
    write_file(&out_dir.join(format!("{stem}.csv")), &csv)?;

    let samples: Vec<(f64, f64)> = (1..field.ny())
        .map(|j| (field.ys()[j], field.value(0, j)))
        .collect();
    let fit = analysis::fit_exponent(&samples, analysis::default_fit_window(&field));
    let mut gp = String::new();
    let _ = writeln!(gp, "# u vs x2 along the first column, log-log, with the");
    let _ = writeln!(gp, "# fitted boundary power law overlaid.");
    let _ = writeln!(gp, "set datafile separator \",\"");
    let _ = writeln!(gp, "set logscale xy");
    let _ = writeln!(gp, "set xlabel \"x2\"");
    let _ = writeln!(gp, "set ylabel \"u\"");
    let x0 = field.xs()[0];
    match &fit {
        Ok(f) => {
            let _ = writeln!(gp, "fitc = {}", fmt17(f.constant));
            let _ = writeln!(gp, "fite = {}", fmt17(f.exponent));
            let _ = writeln!(
                gp,
                "plot \"{stem}.csv\" using 2:($1=={x0}&&$2>0?$3:1/0) title \"u\", \\"
            );
            let _ = writeln!(gp, "     fitc*x**fite title sprintf(\"%.4f x^%.4f\", fitc, fite)");
        }
        Err(e) => {
            let _ = writeln!(gp, "# no exponent fit: {e}");
            let _ = writeln!(
                gp,
                "plot \"{stem}.csv\" using 2:($1=={x0}&&$2>0?$3:1/0) title \"u\""
            );
        }
    }
    write_file(&out_dir.join(format!("{stem}.gnuplot")), &gp)?;

    emit(&format!("min_dudxN={}", fmt17(strip::monotonicity_check(&field))));
    Ok(())
}

fn cmd_check(
    path: Option<&Path>,
    overrides: &[(String, String)],
    list: bool,
) -> Result<(), Failure> {
    let cfg =
        KvConfig::load(path, overrides, &["tol_scale", "seed", "only"]).map_err(usage_err)?;
    if list {
        for (id, name) in acceptance::CRITERIA {
            emit(&format!("{id} {name}"));
        }
        return Ok(());
    }
    let tol_scale = cfg.f64_or("tol_scale", 1.0).map_err(usage_err)?;
    let mut seed = cfg
        .u64_or("seed", acceptance::DEFAULT_SEED)
        .map_err(usage_err)?;
    if let Ok(env_seed) = std::env::var("SPLAP_SEED") {
        seed = env_seed
            .parse()
            .map_err(|_| usage_err(format!("SPLAP_SEED: `{env_seed}` is not a nonnegative integer")))?;
    }

    let results = match cfg.get("only") {
        Some(id) => vec![acceptance::run_one(id, tol_scale, seed).map_err(core_err)?],
        None => acceptance::run_all(tol_scale, seed),
    };
    let mut failed = 0usize;
    for r in &results {
        emit(&acceptance::format_line(r));
        if !r.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err((4, format!("{failed} criterion(s) failed")));
    }
    Ok(())
}
