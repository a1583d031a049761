//! `nls-scatter`: batch front end for the scattering, cover, divisor, flow
//! and bracket computations and the residual suites.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use nls_scatter::bracket::{bracket_pi_closed_form, bracket_pi_direct, bracket_pi_fd};
use nls_scatter::config::ContourSpec;
use nls_scatter::cover::{log_branches_multi, standard_contour, write_log_branches_csv};
use nls_scatter::divisor::{divisor_sweep, geometric_abel};
use nls_scatter::flows::{isospectrality_check, run_flow, FlowKind, FlowSigns, FlowSpec};
use nls_scatter::report::write_json_value;
use nls_scatter::scattering::scattering_coefficients;
use nls_scatter::suite::{abel_lambda_grid, rel, FD_BRACKET_HALF_WIDTH, FD_BRACKET_PANEL};
use nls_scatter::{run_suite, Error, Potential, SuiteConfig, SuiteName};

#[derive(Parser, Debug)]
#[command(name = "nls-scatter", version, about = "Direct scattering for the defocusing NLS Dirac operator")]
struct Cli {
    /// Key-value configuration file (falls back to $ZS_SCATTER_CONFIG).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override one configuration key, e.g. `--set grid.n=4096`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Debug, Clone)]
struct PotentialArg {
    /// Potential spec such as `sech:A=0.3,w=2`; defaults to the first configured one.
    #[arg(long)]
    potential: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Scattering coefficients a, b over a real lambda grid.
    Scatter {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: Option<f64>,
        #[arg(long)]
        n_lambda: Option<usize>,
    },
    /// Continuous logarithms of Pi and Upsilon along the standard contour.
    Cover {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x: f64,
        /// `banks:arc_nodes:refine`, e.g. `both:32:2`.
        #[arg(long)]
        contour: Option<ContourSpec>,
    },
    /// The divisor (xi, sign omega) and oval heights over the lambda grid.
    Divisor {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x: f64,
    },
    /// Geometric continuum Abel map between two positions.
    Abel {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.5)]
        x: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -0.5)]
        x0: f64,
    },
    /// Runs one hierarchy flow and reports drifts or the moved divisor.
    Flow {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, value_enum, default_value_t = FlowReport::Drift)]
        report: FlowReport,
        /// Position of the divisor for `--report divisor`.
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x: f64,
    },
    /// The bracket {Pi(lambda), Pi(mu)} by one or all methods.
    Bracket {
        #[command(flatten)]
        potential: PotentialArg,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        x: f64,
        /// `RE,IM`
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        lambda: Complex64,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
        mu: Complex64,
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
    },
    /// Runs a residual suite and writes its report.
    Suite {
        #[arg(value_parser = parse_suite)]
        name: SuiteName,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    X1,
    X2,
    Nls,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum FlowReport {
    Drift,
    Divisor,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Method {
    Closed,
    Vjs,
    Fd,
    All,
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s.split_once(',').ok_or_else(|| format!("`{s}`: expected RE,IM"))?;
    let f = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Complex64::new(f(re)?, f(im)?))
}

fn parse_suite(s: &str) -> Result<SuiteName, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// How a command ended when it did not fail outright.
enum Outcome {
    Pass,
    CheckFailed,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Numerical(_) | Error::Branch { .. } | Error::GridMismatch => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global() {
            eprintln!("error: cannot size the thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    let start = Instant::now();
    let res = run(&cli);
    eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
    match res {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn load_config(cli: &Cli) -> nls_scatter::Result<SuiteConfig> {
    let mut cfg = SuiteConfig::load(cli.config.as_deref())?;
    for kv in &cli.overrides {
        cfg.set_pair(kv)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn potential(cfg: &SuiteConfig, arg: &PotentialArg) -> nls_scatter::Result<Potential> {
    let mut cfg = cfg.clone();
    if let Some(spec) = &arg.potential {
        cfg.set("potentials", spec)?;
    }
    let mut all = cfg.potentials()?;
    if all.is_empty() {
        return Err(Error::Config("no potential given".into()));
    }
    Ok(all.swap_remove(0).1)
}

fn sink(cli: &Cli) -> nls_scatter::Result<Box<dyn Write>> {
    Ok(match &cli.out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Emits a JSON value, or runs `csv` on the sink.
fn emit(cli: &Cli, value: Value, csv: impl FnOnce(&mut dyn Write) -> nls_scatter::Result<()>) -> nls_scatter::Result<()> {
    let mut w = sink(cli)?;
    match cli.format {
        Format::Json => write_json_value(&value, &mut w)?,
        Format::Csv => csv(&mut w)?,
    }
    w.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> nls_scatter::Result<Outcome> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Scatter {
            potential: pa,
            lambda_min,
            lambda_max,
            n_lambda,
        } => {
            let p = potential(&cfg, pa)?;
            let mut range = cfg.lambda_range;
            range.min = lambda_min.unwrap_or(range.min);
            range.max = lambda_max.unwrap_or(range.max);
            range.n = n_lambda.unwrap_or(range.n);
            if !(range.min < range.max) || range.n < 2 {
                return Err(Error::Config("need lambda-min < lambda-max and n-lambda >= 2".into()));
            }
            let sd = scattering_coefficients(&p, &range.points())?;
            let mut v = sd.to_json();
            v["potential"] = json!(p.label());
            v["unitarity_defect"] = json!(sd.unitarity_defect());
            emit(cli, v, |w| sd.write_csv(w))?;
        }
        Command::Cover { potential: pa, x, contour } => {
            let p = potential(&cfg, pa)?;
            let spec = contour.unwrap_or(cfg.contour);
            let real = cfg.lambda_range.points();
            let mut all = Vec::new();
            for bank in spec.banks.half_planes() {
                let c = standard_contour(&real, bank, spec.arc_nodes, spec.refine);
                all.extend(log_branches_multi(&p, &[*x], &c, bank)?);
            }
            let v = json!({ "potential": p.label(), "branches": serde_json::to_value(&all)? });
            emit(cli, v, |w| write_log_branches_csv(&all, w))?;
        }
        Command::Divisor { potential: pa, x } => {
            let p = potential(&cfg, pa)?;
            let d = divisor_sweep(&p, *x, &cfg.lambda_range.points())?;
            let mut v = serde_json::to_value(&d)?;
            v["potential"] = json!(p.label());
            v["containment_excess"] = json!(d.containment_excess());
            emit(cli, v, |w| d.write_csv(w))?;
        }
        Command::Abel { potential: pa, x, x0 } => {
            let p = potential(&cfg, pa)?;
            let g = geometric_abel(&p, *x, *x0, &abel_lambda_grid())?;
            let b_min = 0.05;
            let residual = g.max_residual(b_min);
            let mut v = serde_json::to_value(&g)?;
            v["potential"] = json!(p.label());
            v["max_residual"] = json!(residual);
            emit(cli, v, |w| g.write_csv(w))?;
            if !(residual <= cfg.tol("abel")) {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Flow {
            potential: pa,
            which,
            t,
            report,
            x,
        } => {
            let p = potential(&cfg, pa)?;
            let kind = match which {
                Which::X1 => FlowKind::X1,
                Which::X2 => FlowKind::X2,
                Which::Nls => FlowKind::Nls,
            };
            let spec = FlowSpec::new(kind, *t);
            let signs = if p.is_zero() { FlowSigns::default() } else { FlowSigns::calibrate(&p)? };
            match report {
                FlowReport::Drift => {
                    let d = isospectrality_check(&p, &spec, &signs, &cfg.lambda_range.points())?;
                    let tol = match kind {
                        FlowKind::Nls => cfg.tol("drift_nls"),
                        _ => cfg.tol("drift_x"),
                    };
                    let pass = d.abs_a_drift <= tol;
                    let mut v = serde_json::to_value(&d)?;
                    v["potential"] = json!(p.label());
                    v["hamiltonian_drift"] = json!(d.hamiltonian_drift());
                    v["tol"] = json!(tol);
                    v["pass"] = json!(pass);
                    emit(cli, v, |w| {
                        writeln!(w, "flow,t,abs_a_drift,abs_b_drift,a_drift,hamiltonian_drift,tol,pass")?;
                        writeln!(
                            w,
                            "{},{},{},{},{},{},{},{}",
                            kind.name(),
                            fmt(*t),
                            fmt(d.abs_a_drift),
                            fmt(d.abs_b_drift),
                            fmt(d.a_drift),
                            fmt(d.hamiltonian_drift()),
                            fmt(tol),
                            pass
                        )?;
                        Ok(())
                    })?;
                    if !pass {
                        return Ok(Outcome::CheckFailed);
                    }
                }
                FlowReport::Divisor => {
                    let q = run_flow(&p, &spec, &signs)?;
                    let d = divisor_sweep(&q, *x, &cfg.lambda_range.points())?;
                    let mut v = serde_json::to_value(&d)?;
                    v["potential"] = json!(p.label());
                    v["flow"] = serde_json::to_value(spec)?;
                    emit(cli, v, |w| d.write_csv(w))?;
                }
            }
        }
        Command::Bracket {
            potential: pa,
            x,
            lambda,
            mu,
            method,
        } => {
            let p = potential(&cfg, pa)?;
            let (l, m) = (*lambda, *mu);
            // the closed form is the reference for every other method
            let want = |k: Method| *method == k || *method == Method::All;
            let c = bracket_pi_closed_form(&p, *x, l, m)?;
            let vjs = want(Method::Vjs).then(|| bracket_pi_direct(&p, *x, l, m)).transpose()?;
            let fd = want(Method::Fd)
                .then(|| bracket_pi_fd(&p, *x, l, m, FD_BRACKET_PANEL, FD_BRACKET_HALF_WIDTH))
                .transpose()?;
            let mut rows = vec![("closed", c, 0.0, 0.0)];
            if let Some(v) = vjs {
                rows.push(("vjs", v, rel(v, c), cfg.tol("pbpi")));
            }
            if let Some(v) = fd {
                rows.push(("fd", v, rel(v, c), cfg.tol("fd_bracket")));
            }
            let pass = rows.iter().all(|r| r.2 <= r.3);
            let z = |z: Complex64| json!([z.re, z.im]);
            let methods: serde_json::Map<String, Value> = rows
                .iter()
                .map(|r| (r.0.to_string(), json!({ "value": z(r.1), "rel_to_closed": r.2, "tol": r.3 })))
                .collect();
            let v = json!({
                "potential": p.label(),
                "x": x,
                "lambda": z(l),
                "mu": z(m),
                "methods": methods,
                "pass": pass,
            });
            emit(cli, v, |w| {
                writeln!(w, "method,re,im,rel_to_closed,tol")?;
                for r in &rows {
                    writeln!(w, "{},{},{},{},{}", r.0, fmt(r.1.re), fmt(r.1.im), fmt(r.2), fmt(r.3))?;
                }
                Ok(())
            })?;
            if !pass {
                return Ok(Outcome::CheckFailed);
            }
        }
        Command::Suite { name } => {
            let report = run_suite(*name, &cfg)?;
            let mut w = sink(cli)?;
            match cli.format {
                Format::Json => report.write_json(&mut w)?,
                Format::Csv => report.write_csv(&mut w)?,
            }
            w.flush()?;
            let failed: Vec<_> = report.failures().collect();
            eprintln!(
                "suite {}: {} records, {} failed, max residual {:.3e}",
                report.suite,
                report.records.len(),
                failed.len(),
                report.max_residual()
            );
            for r in &failed {
                eprintln!("  FAIL {} residual {:.3e} > tol {:.1e}", r.id, r.residual, r.tol);
            }
            if !failed.is_empty() {
                return Ok(Outcome::CheckFailed);
            }
        }
    }
    Ok(Outcome::Pass)
}

fn fmt(v: f64) -> String {
    nls_scatter::grid::fmt17(v)
}
