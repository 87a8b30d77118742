//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a computation or file operation fails,
//! 2 for usage errors (unknown flags, missing or invalid parameters).
//!
//! `--config FILE` reads flat `key = value` lines. Each becomes `--key value`
//! placed before the command-line flags, so explicit flags take precedence.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::evolution::{propagate, PropagateOptions};
use crate::graph::{build_grid, GraphState};
use crate::io::{self, read_document, write_document, write_text, Document};
use crate::orlicz::{functionals, log_integral, mass, nehari, q_functional, FunctionalReport};
use crate::rearrange::{distribution, rearrange};
use crate::stability::{stability_run, PerturbationKind, Reference, StabilityOptions};
use crate::stationary::{action_closed_form, stationary_residual, stationary_state, Residual, StationaryParams};
use crate::variational::{gamma_grid, minimize_action, threshold_bracket, threshold_scan, Init, MinimizeOptions};

#[derive(Debug, Parser)]
#[command(
    name = "lognls",
    version,
    about = "Logarithmic NLS on a star graph with a delta vertex"
)]
#[command(args_override_self = true)]
struct Cli {
    /// Flat key = value file supplying default flag values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
struct GridArgs {
    /// Edge truncation length.
    #[arg(long = "L", default_value_t = 20.0)]
    length: f64,
    /// Samples per edge.
    #[arg(long = "M", default_value_t = 2000)]
    points: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a closed-form stationary state and report its residuals.
    Stationary {
        #[arg(long = "N")]
        edges: usize,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[arg(long, default_value_t = 0)]
        kappa: usize,
        #[command(flatten)]
        grid: GridArgs,
        /// Write the state as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the state as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Write the residual and functional report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evolve a state and log conservation.
    Evolve {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        /// Regularization index (default covers the dynamic range of the data).
        #[arg(long)]
        m: Option<u64>,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long = "T")]
        horizon: f64,
        #[arg(long, default_value_t = 1000)]
        stride: usize,
        /// Directory for snapshots and the conservation log.
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
    /// Minimize the action on the Nehari manifold.
    Minimize {
        #[arg(long = "N")]
        edges: usize,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        /// Initial state (JSON); defaults to a Gaussian at the vertex.
        #[arg(long)]
        init: Option<PathBuf>,
        /// Seed for a random symmetric initial state.
        #[arg(long, conflicts_with = "init")]
        seed: Option<u64>,
        /// With --seed, put a single bump on one edge instead.
        #[arg(long, requires = "seed")]
        asymmetric: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long = "max-iter", default_value_t = 50_000)]
        max_iter: usize,
        /// Write the report (including the final state) as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare S(phi^0) with the Kirchhoff level over a range of gamma.
    Threshold {
        #[arg(long = "N")]
        edges: usize,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[arg(long = "gamma-min", allow_negative_numbers = true)]
        gamma_min: f64,
        #[arg(long = "gamma-max", allow_negative_numbers = true)]
        gamma_max: f64,
        #[arg(long)]
        steps: usize,
        /// Write the scan as CSV (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the scan and its bracket as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Symmetric rearrangement of a state.
    Rearrange {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Frequency used for the Q/I comparison.
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        omega: f64,
    },
    /// Orbital-stability experiment around the ground state.
    Stability {
        #[arg(long = "N")]
        edges: usize,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long, allow_negative_numbers = true)]
        omega: f64,
        #[arg(long)]
        eps: f64,
        #[arg(long = "T", default_value_t = 50.0)]
        horizon: f64,
        #[arg(long, default_value = "symmetric")]
        kind: PerturbationKind,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Compare against the sampled closed form instead of the discrete ground state.
        #[arg(long)]
        sampled_reference: bool,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the (t, dist_l2, dist_w) series as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Summarize result files into one table.
    Report {
        paths: Vec<PathBuf>,
        /// Emit JSON instead of CSV.
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses `argv` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match expand_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidGrid(_) | Error::InvalidParameter(_) => 2,
                _ => 1,
            }
        }
    }
}

/// Splices the contents of `--config FILE` into the argument list, right
/// after the subcommand name.
fn expand_config(argv: Vec<OsString>) -> std::result::Result<Vec<OsString>, String> {
    let mut path = None;
    let mut rest = Vec::with_capacity(argv.len());
    let mut it = argv.into_iter();
    while let Some(arg) = it.next() {
        let s = arg.to_string_lossy();
        if s == "--config" {
            let p = it.next().ok_or("--config needs a file")?;
            path = Some(PathBuf::from(p));
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };
    let injected = parse_config(&path)?;
    // Position 0 is the program name; the subcommand is the first non-flag.
    let at = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 2)
        .ok_or("a subcommand is required")?;
    let tail = rest.split_off(at);
    rest.extend(injected);
    rest.extend(tail);
    Ok(rest)
}

fn parse_config(path: &Path) -> std::result::Result<Vec<OsString>, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{}:{}: expected key = value", path.display(), n + 1))?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(format!("{}:{}: empty key", path.display(), n + 1));
        }
        match value {
            "true" => out.push(format!("--{key}").into()),
            "false" => {}
            v => {
                out.push(format!("--{key}").into());
                out.push(v.into());
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize)]
struct StationaryReport {
    params: StationaryParams,
    h_kappa: f64,
    residual: Residual,
    action_closed_form: f64,
    functionals: FunctionalReport,
}

#[derive(Debug, Serialize)]
struct ThresholdReport {
    edges: usize,
    omega: f64,
    rows: Vec<crate::variational::ThresholdRow>,
    bracket: Option<(f64, f64)>,
}

#[derive(Debug, Serialize)]
struct RearrangeReport {
    mass_before: f64,
    mass_after: f64,
    log_int_before: f64,
    log_int_after: f64,
    gradient_before: f64,
    gradient_after: f64,
    max_distribution_gap: f64,
    q_rearranged: f64,
    nehari_kirchhoff: f64,
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Stationary {
            edges,
            gamma,
            omega,
            kappa,
            grid,
            out,
            csv,
            report,
        } => {
            let params = StationaryParams::new(edges, gamma, omega, kappa)?;
            let g = build_grid(edges, grid.length, grid.points)?;
            let u = stationary_state(&params, g)?;
            let rep = StationaryReport {
                params,
                h_kappa: params.h_kappa(),
                residual: stationary_residual(&u, omega, gamma),
                action_closed_form: action_closed_form(&params),
                functionals: functionals(&u, omega, gamma),
            };
            let mut table = Table::default();
            table.row("h_kappa", rep.h_kappa);
            table.row("residual.interior", rep.residual.interior);
            table.row("residual.jump", rep.residual.jump);
            table.row("action (closed form)", rep.action_closed_form);
            table.functionals(&rep.functionals);
            table.print();
            if let Some(p) = out {
                io::save_state(&p, &u)?;
            }
            if let Some(p) = csv {
                write_text(&p, &io::state_csv(&u))?;
            }
            if let Some(p) = report {
                write_document(&p, "stationary_report", &rep)?;
            }
            Ok(())
        }
        Command::Evolve {
            input,
            gamma,
            m,
            dt,
            horizon,
            stride,
            out_dir,
        } => {
            let u0 = io::load_state(&input)?;
            let mut opts = PropagateOptions::new(dt, horizon).with_stride(stride);
            opts.m = m;
            let traj = propagate(&u0, gamma, &opts)?;
            fs::create_dir_all(&out_dir).map_err(|source| Error::Io {
                path: out_dir.clone(),
                source,
            })?;
            for (k, u) in traj.states.iter().enumerate() {
                io::save_state(&out_dir.join(format!("state_{k:05}.json")), u)?;
            }
            write_text(&out_dir.join("conservation.csv"), &io::conservation_csv(&traj))?;
            let mut table = Table::default();
            table.row("m", traj.m as f64);
            table.row("steps", (traj.step_times.len() - 1) as f64);
            table.row("snapshots", traj.states.len() as f64);
            table.row("max mass drift", traj.max_mass_drift());
            table.row("max energy drift", traj.max_energy_drift());
            table.print();
            Ok(())
        }
        Command::Minimize {
            edges,
            gamma,
            omega,
            init,
            seed,
            asymmetric,
            grid,
            tol,
            max_iter,
            out,
        } => {
            let start = match (init, seed) {
                (Some(p), _) => Init::FromState(io::load_state(&p)?),
                (None, Some(s)) if asymmetric => Init::RandomAsymmetric(s),
                (None, Some(s)) => Init::RandomSymmetric(s),
                (None, None) => Init::VertexGaussian,
            };
            let mut opts = MinimizeOptions::new(grid.length, grid.points);
            opts.tol = tol;
            opts.max_iter = max_iter;
            let rep = minimize_action(edges, gamma, omega, start, &opts)?;
            let mut table = Table::default();
            table.row("iterations", rep.iterations as f64);
            table.text("converged", rep.converged.to_string());
            table.row("final action", rep.final_action);
            table.row("final nehari", rep.final_nehari);
            if let Some(d) = rep.dist_mod_phase_to_phi0 {
                table.row("dist to phi0 (mod phase)", d);
            }
            table.row("centroid", rep.centroid);
            table.text("escaped", rep.escaped.to_string());
            table.print();
            if let Some(p) = out {
                write_document(&p, "minimize_report", &rep)?;
            }
            Ok(())
        }
        Command::Threshold {
            edges,
            omega,
            gamma_min,
            gamma_max,
            steps,
            out,
            report,
        } => {
            let rows = threshold_scan(edges, omega, &gamma_grid(gamma_min, gamma_max, steps)?)?;
            let csv = io::threshold_csv(&rows);
            match out {
                Some(p) => write_text(&p, &csv)?,
                None => print!("{csv}"),
            }
            let bracket = threshold_bracket(&rows);
            match bracket {
                Some((a, b)) => eprintln!("sign change between gamma = {a} and gamma = {b}"),
                None => eprintln!("no sign change in the scanned range"),
            }
            if let Some(p) = report {
                write_document(
                    &p,
                    "threshold_scan",
                    &ThresholdReport {
                        edges,
                        omega,
                        rows,
                        bracket,
                    },
                )?;
            }
            Ok(())
        }
        Command::Rearrange { input, out, omega } => {
            let u = io::load_state(&input)?;
            let r = rearrange(&u);
            io::save_state(&out, &r)?;
            let rep = rearrange_report(&u, &r, omega);
            let mut table = Table::default();
            table.row("mass before", rep.mass_before);
            table.row("mass after", rep.mass_after);
            table.row("log integral before", rep.log_int_before);
            table.row("log integral after", rep.log_int_after);
            table.row("|u'|^2 before", rep.gradient_before);
            table.row("|u*'|^2 after", rep.gradient_after);
            table.row("max distribution gap", rep.max_distribution_gap);
            table.row("Q(u*)", rep.q_rearranged);
            table.row("I_0(u)", rep.nehari_kirchhoff);
            table.print();
            Ok(())
        }
        Command::Stability {
            edges,
            gamma,
            omega,
            eps,
            horizon,
            kind,
            dt,
            seed,
            sampled_reference,
            grid,
            out,
            csv,
        } => {
            let opts = StabilityOptions {
                length: grid.length,
                points: grid.points,
                dt,
                seed,
                reference: if sampled_reference {
                    Reference::Sampled
                } else {
                    Reference::DiscreteGroundState
                },
                ..StabilityOptions::default()
            };
            let rep = stability_run(edges, gamma, omega, eps, horizon, kind, &opts)?;
            let mut table = Table::default();
            table.row("epsilon", rep.epsilon);
            table.row("horizon", rep.horizon);
            table.row("sup W-distance", rep.sup_dist);
            table.row("ratio", rep.ratio);
            table.row("sup L2-distance", rep.sup_dist_l2);
            table.row("max mass drift", rep.max_mass_drift);
            table.row("max energy drift", rep.max_energy_drift);
            table.print();
            if let Some(p) = csv {
                write_text(&p, &io::stability_csv(&rep))?;
            }
            if let Some(p) = out {
                write_document(&p, "stability_report", &rep)?;
            }
            Ok(())
        }
        Command::Report { paths, json, out } => {
            let docs = paths.iter().map(|p| read_document(p)).collect::<Result<Vec<_>>>()?;
            let rows = docs.iter().map(summarize).collect::<Result<Vec<_>>>()?;
            let text = if json {
                serde_json::to_string_pretty(&io::to_document("summary", &SummaryDoc { entries: rows })?)? + "\n"
            } else {
                let mut s = String::from("file,kind,key,value\n");
                for row in &rows {
                    for (k, v) in &row.metrics {
                        let _ = writeln!(s, "{},{},{},{}", row.file, row.kind, k, v);
                    }
                }
                s
            };
            match out {
                Some(p) => write_text(&p, &text)?,
                None => {
                    let _ = std::io::stdout().write_all(text.as_bytes());
                }
            }
            Ok(())
        }
    }
}

fn rearrange_report(u: &GraphState, r: &GraphState, omega: f64) -> RearrangeReport {
    let peak = u.max_modulus();
    let max_distribution_gap = (1..200)
        .map(|k| {
            let s = peak * k as f64 / 200.0;
            (distribution(u, s) - distribution(r, s)).abs()
        })
        .fold(0.0, f64::max);
    RearrangeReport {
        mass_before: mass(u),
        mass_after: mass(r),
        log_int_before: log_integral(u),
        log_int_after: log_integral(r),
        gradient_before: crate::graph::gradient_energy(u),
        gradient_after: crate::graph::gradient_energy(r),
        max_distribution_gap,
        q_rearranged: q_functional(r, omega),
        nehari_kirchhoff: nehari(u, omega, 0.0),
    }
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    file: String,
    kind: String,
    metrics: Vec<(String, String)>,
}

#[derive(Debug, Serialize)]
struct SummaryDoc {
    entries: Vec<SummaryRow>,
}

fn summarize(doc: &Document) -> Result<SummaryRow> {
    let pick = |keys: &[&str]| -> Vec<(String, String)> {
        keys.iter()
            .filter_map(|k| doc.body.get(*k).map(|v| (k.to_string(), scalar(v))))
            .collect()
    };
    let metrics = match doc.kind.as_str() {
        "stationary_report" => {
            let mut m = pick(&["h_kappa", "action_closed_form"]);
            if let Some(f) = doc.body.get("functionals") {
                for k in ["mass", "action", "nehari", "w_norm"] {
                    if let Some(v) = f.get(k) {
                        m.push((k.to_string(), scalar(v)));
                    }
                }
            }
            m
        }
        "minimize_report" => pick(&[
            "iterations",
            "converged",
            "final_action",
            "final_nehari",
            "dist_mod_phase_to_phi0",
            "centroid",
            "escaped",
        ]),
        "stability_report" => pick(&["epsilon", "horizon", "sup_dist", "ratio", "sup_dist_l2"]),
        "threshold_scan" => {
            let mut m = pick(&["edges", "omega"]);
            match doc.body.get("bracket") {
                Some(Value::Array(b)) if b.len() == 2 => {
                    m.push(("bracket_lo".into(), scalar(&b[0])));
                    m.push(("bracket_hi".into(), scalar(&b[1])));
                }
                _ => m.push(("bracket".into(), "none".into())),
            }
            m
        }
        "graph_state" => pick(&["N", "L", "M"]),
        other => {
            return Err(Error::Format {
                path: doc.path.clone(),
                message: format!("cannot summarize documents of kind {other}"),
            })
        }
    };
    Ok(SummaryRow {
        file: doc.path.display().to_string(),
        kind: doc.kind.clone(),
        metrics,
    })
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

#[derive(Default)]
struct Table {
    rows: Vec<(String, String)>,
}

impl Table {
    fn row(&mut self, key: &str, value: f64) {
        self.rows.push((key.to_string(), format!("{value:.10e}")));
    }

    fn text(&mut self, key: &str, value: String) {
        self.rows.push((key.to_string(), value));
    }

    fn functionals(&mut self, f: &FunctionalReport) {
        self.row("mass", f.mass);
        self.row("form", f.form);
        self.row("log integral", f.log_int);
        self.row("energy", f.energy);
        self.row("action", f.action);
        self.row("nehari", f.nehari);
        self.row("w norm", f.w_norm);
    }

    fn print(&self) {
        let width = self.rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
        for (k, v) in &self.rows {
            println!("{k:<width$}  {v:>18}");
        }
    }
}
