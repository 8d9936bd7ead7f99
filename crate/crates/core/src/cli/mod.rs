//! Command-line front end. Every subcommand can also be driven by a JSON
//! config whose keys are the subcommand's long flags.

mod args;

pub use args::*;

use crate::analysis::{self, cone_sweep, fs_current_sup, lp_deviation, tyz_a1_estimate};
use crate::error::{Error, Result};
use crate::gram_kernel::gram::gram_disc_field;
use crate::gram_kernel::{cpn_fs_exact, cpn_oracle_at_unit_point, gram_matrix, GramModel, RevolutionKernel};
use crate::models::{rescale_to_area, CyclicWeights, PerturbedPotential, RevolutionProfile};
use crate::orbifold_kernel::{ray_scan, min_on_ray, rho_closed, rho_oracle_tol};
use crate::resonance::{construct_certificate, find_subunity_point, verify_certificate, ResonanceCertificate};
use clap::Parser;
use num_complex::Complex64;
use std::io::Write;
use std::path::Path;

/// Runs the tool with `argv` (including the program name) and returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let cli = match cli.command {
        Command::Config(ref c) => match load_config(&c.path) {
            Ok(cfg) => Cli { threads: cli.threads.or(cfg.threads), command: cfg.command },
            Err(e) => return report(e, err),
        },
        _ => cli,
    };
    let pool = match cli.threads {
        Some(0) => return report(Error::invalid("--threads must be at least 1"), err),
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build(),
        None => rayon::ThreadPoolBuilder::new().build(),
    };
    let pool = match pool {
        Ok(p) => p,
        Err(e) => return report(Error::compute(format!("thread pool: {e}")), err),
    };
    let mut buf: Vec<u8> = Vec::new();
    let result = pool.install(|| dispatch(&cli.command, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(()) => 0,
        Err(e) => report(e, err),
    }
}

fn report(e: Error, err: &mut dyn Write) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if e.is_validation() {
        2
    } else {
        1
    }
}

/// Turns a JSON object into the equivalent command line and parses it.
pub fn parse_config_text(text: &str) -> Result<Cli> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::invalid(format!("malformed config: {e}")))?;
    let obj = value.as_object().ok_or_else(|| Error::invalid("config must be a JSON object"))?;
    let command = obj
        .get("command")
        .and_then(|c| c.as_str())
        .ok_or_else(|| Error::invalid("config needs a string field \"command\""))?;
    if command == "config" {
        return Err(Error::invalid("a config file cannot run another config"));
    }
    let mut argv = vec!["bergman".to_string(), command.to_string()];
    for (key, val) in obj.iter().filter(|(k, _)| k.as_str() != "command") {
        let flag = format!("--{}", key.replace('_', "-"));
        let text = match val {
            serde_json::Value::Null => continue,
            serde_json::Value::Bool(true) => {
                argv.push(flag);
                continue;
            }
            serde_json::Value::Bool(false) => continue,
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) => n.to_string(),
            serde_json::Value::Array(items) => {
                let parts: Vec<String> = items
                    .iter()
                    .map(|v| match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .collect();
                parts.join(",")
            }
            serde_json::Value::Object(_) => return Err(Error::invalid(format!("key '{key}' cannot be an object"))),
        };
        argv.push(flag);
        argv.push(text);
    }
    Cli::try_parse_from(&argv).map_err(|e| {
        let msg = e.to_string();
        Error::invalid(format!("config rejected: {}", msg.lines().next().unwrap_or("")))
    })
}

pub fn load_config(path: &Path) -> Result<Cli> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

/// `#`-prefixed provenance lines: tool version and the fully resolved command.
pub fn header(command: &Command) -> String {
    let cfg = serde_json::to_string(command).unwrap_or_default();
    format!("# bergman {}\n# config: {cfg}\n", env!("CARGO_PKG_VERSION"))
}

fn emit(command: &Command, csv: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<()> {
    let body = format!("{}{csv}", header(command));
    match path {
        Some(p) => {
            std::fs::write(p, body).map_err(|e| Error::compute(format!("cannot write {}: {e}", p.display())))?;
            writeln!(out, "wrote {}", p.display()).map_err(io_err)
        }
        None => out.write_all(body.as_bytes()).map_err(io_err),
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::compute(format!("output: {e}"))
}

fn parse_point(text: &str) -> Result<Vec<Complex64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .replace(' ', "")
                .parse::<Complex64>()
                .map_err(|_| Error::invalid(format!("cannot parse coordinate '{s}'")))
        })
        .collect()
}

fn build_profile(a: &ProfileArgs) -> Result<RevolutionProfile> {
    let base = match a.profile {
        ProfileKind::Round => RevolutionProfile::round(),
        ProfileKind::Cone => RevolutionProfile::cone_approx(a.k)?,
        ProfileKind::Limit => RevolutionProfile::cone_limit(),
        ProfileKind::Csv => {
            let path = a.file.as_ref().ok_or_else(|| Error::invalid("--profile csv needs --file"))?;
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
            RevolutionProfile::from_csv(&text)?
        }
    };
    rescale_to_area(&base, a.d)
}

fn positive(name: &str, v: u32) -> Result<()> {
    if v == 0 {
        return Err(Error::invalid(format!("{name} must be positive")));
    }
    Ok(())
}

fn certificate_text(w: &CyclicWeights, c: &ResonanceCertificate) -> String {
    let v = verify_certificate(w, &c.r, c.j);
    let r: Vec<String> = c.r.iter().map(|x| format!("{x:e}")).collect();
    format!(
        "weights = {w}\nq = {}\nr = {}\nj = {}\nmargin = {:e}\nsin_sum = {:e}\nargmax = {:?}\nverified = {}\n",
        w.q(),
        r.join(","),
        c.j,
        c.margin,
        c.sin_sum,
        v.argmax,
        v.pass
    )
}

fn dispatch(command: &Command, out: &mut Vec<u8>) -> Result<()> {
    let mut say = |s: String| out.write_all(s.as_bytes()).map_err(io_err);
    match command {
        Command::OrbifoldEval(a) => {
            let w = CyclicWeights::parse(&a.weights)?;
            let z = parse_point(&a.z)?;
            if !(a.tol > 0.0) {
                return Err(Error::invalid("--tol must be positive"));
            }
            let c = rho_closed(&w, &z)?;
            let o = rho_oracle_tol(&w, &z, a.tol)?;
            say(format!(
                "rho = {:.15}\nimag_residue = {:e}\noracle = {:.15}\noracle_cap = {}\noracle_tail_bound = {:e}\n",
                c.rho, c.imag_residue, o.rho, o.cap, o.tail_bound
            ))
        }
        Command::OrbifoldRay(a) => {
            let w = CyclicWeights::parse(&a.weights)?;
            let dir = if a.direction.is_empty() { vec![1.0; w.n()] } else { a.direction.clone() };
            let rows = ray_scan(&w, &dir, a.t_max, a.nodes)?;
            let (t, rho) = min_on_ray(&w, &dir, a.t_max, a.nodes)?;
            let mut csv = format!("# min t = {t:e}, rho = {rho:e}\nt,rho\n");
            for (t, r) in rows {
                csv.push_str(&format!("{t:e},{r:e}\n"));
            }
            emit(command, &csv, a.out.as_deref(), out)
        }
        Command::Resonance(a) => {
            let w = CyclicWeights::parse(&a.weights)?;
            let c = construct_certificate(&w)?;
            say(certificate_text(&w, &c))
        }
        Command::Subunity(a) => {
            let w = CyclicWeights::parse(&a.weights)?;
            let c = construct_certificate(&w)?;
            let s = find_subunity_point(&w, &c, a.k_max)?;
            let z: Vec<String> = s.z.iter().map(|c| format!("{:e}", c.re)).collect();
            let k = s.k.map_or("ray-minimum".to_string(), |k| k.to_string());
            say(format!(
                "{}z = {}\nt = {:e}\nt2 = {:.12}\nrho = {:.15}\nk = {k}\n",
                certificate_text(&w, &c),
                z.join(","),
                s.t,
                s.t * s.t,
                s.rho
            ))
        }
        Command::Revolution(a) => {
            positive("m", a.m)?;
            if a.grid < 2 {
                return Err(Error::invalid("--grid must be at least 2"));
            }
            let p = build_profile(&a.profile)?;
            let ker = RevolutionKernel::new(&p, a.m)?;
            let mut csv = String::new();
            if a.norms {
                csv.push_str("k,log_N_k\n");
                for (k, v) in ker.norms.log.iter().enumerate() {
                    csv.push_str(&format!("{k},{v:e}\n"));
                }
            } else {
                let l = p.length();
                let radii: Vec<f64> = (0..a.grid).map(|i| l * i as f64 / (a.grid - 1) as f64).collect();
                let field = ker.field(&radii)?;
                csv.push_str(&format!(
                    "# inf = {:e}, sup = {:e}, argmin = {:e}, integral = {:e}\n",
                    field.stats.inf,
                    field.stats.sup,
                    field.stats.argmin,
                    field.stats.integral.unwrap_or(f64::NAN)
                ));
                csv.push_str("r,rho\n");
                for s in &field.samples {
                    csv.push_str(&format!("{:e},{:e}\n", s.r, s.value));
                }
            }
            emit(command, &csv, a.out.as_deref(), out)
        }
        Command::Gram(a) => {
            positive("m", a.m)?;
            let pert = if a.k == 0 { PerturbedPotential::none() } else { PerturbedPotential::new(a.k)? };
            let g = gram_matrix(&GramModel::new(a.m, pert))?;
            let mut csv = format!("# dim = {}, condition = {:e}\ni,j,re,im\n", g.dim(), g.condition_number());
            for i in 0..g.dim() {
                for j in 0..g.dim() {
                    let v = g.g[(i, j)];
                    csv.push_str(&format!("{i},{j},{:e},{:e}\n", v.re, v.im));
                }
            }
            emit(command, &csv, a.out.as_deref(), out)
        }
        Command::Cpn(a) => {
            let exact = cpn_fs_exact(a.n, a.m);
            let oracle = cpn_oracle_at_unit_point(a.n, a.m)
                .map_or("overflow".to_string(), |v| v.to_string());
            say(format!("rho = {exact}\noracle = {oracle}\n"))
        }
        Command::Tyz(a) => {
            positive("m1", a.m1)?;
            positive("m2", a.m2)?;
            if let Some(n) = a.cpn {
                // The model kernel is a degree-n polynomial in m, so n samples fit it exactly.
                if a.m1 == a.m2 || n == 0 {
                    return Err(Error::invalid("need n ≥ 1 and distinct m1, m2"));
                }
                let step = a.m2 as i64 - a.m1 as i64;
                let samples: Vec<(u32, f64)> = (0..n as i64)
                    .map(|i| a.m1 as i64 + i * step)
                    .filter(|&m| m > 0)
                    .map(|m| (m as u32, cpn_fs_exact(n, m as u32) as f64))
                    .collect();
                if samples.len() < n as usize {
                    return Err(Error::invalid("tensor powers must stay positive"));
                }
                let c = analysis::tyz_coefficients(&samples, n)?;
                let expect = (n * (n + 1)) as f64 / 2.0;
                return say(format!("a1 = {:.12}\nexpected = {expect}\n", c[0]));
            }
            let p = build_profile(&a.profile)?;
            let k1 = RevolutionKernel::new(&p, a.m1)?;
            let k2 = RevolutionKernel::new(&p, a.m2)?;
            let e = tyz_a1_estimate(k1.rho(a.r), k2.rho(a.r), a.m1, a.m2, 1)?;
            let s = analysis::scalar_curvature_profile(&p, a.r)?;
            say(format!("a1 = {:.12}\nresidual = {:e}\nS/2 = {:.12}\n", e.a1, e.residual, s / 2.0))
        }
        Command::Lp(a) => {
            positive("m", a.m)?;
            let p: f64 = match a.p.as_str() {
                "inf" | "infinity" => f64::INFINITY,
                s => s.parse().map_err(|_| Error::invalid(format!("bad exponent '{s}'")))?,
            };
            let field = match a.perturbed {
                Some(k) => analysis::perturbed_field(k, a.m, a.radius.min(1.0))?,
                None => {
                    let prof = build_profile(&a.profile)?;
                    RevolutionKernel::new(&prof, a.m)?.quadrature_field(a.radius, 256)
                }
            };
            let v = lp_deviation(&field, p, a.radius, 1)?;
            say(format!("lp = {v:e}\n"))
        }
        Command::Fscurrent(a) => {
            let mut text = String::from("m,fs_sup\n");
            for &m in &a.ms {
                positive("m", m)?;
                let field = match a.perturbed {
                    Some(k) => {
                        let g = gram_matrix(&GramModel::new(m, PerturbedPotential::new(k)?))?;
                        gram_disc_field(&g, 2.0, 32, 64)
                    }
                    None => {
                        let prof = build_profile(&a.profile)?;
                        RevolutionKernel::new(&prof, m)?.quadrature_field(prof.length(), 128)
                    }
                };
                text.push_str(&format!("{m},{:e}\n", fs_current_sup(&field, m)?));
            }
            say(text)
        }
        Command::ConeSweep(a) => {
            let report = cone_sweep(&a.ks, &a.ms)?;
            let csv = report.to_csv();
            emit(command, &csv, a.out.as_deref(), out)?;
            if a.out.is_some() {
                out.write_all(report.summary().as_bytes()).map_err(io_err)?;
            }
            Ok(())
        }
        Command::Config(_) => Err(Error::invalid("nested config")),
    }
}
