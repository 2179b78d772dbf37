//! `qnscap` front end: `compute`, `verify` and `sweep`.
//!
//! Exit codes: 0 certified, 1 input error, 2 solver error, 3 uncertified
//! result or failed check.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::capacity::{full_report, snap_floor, upsilon, CapacityError, CapacityReport, SIZE_CAP};
use crate::channel::{extremal_channel, parse_channel_spec, pauli_channel, realize, Channel};
use crate::linalg::DEFAULT_RANK_TOL;
use crate::ncgraph::noncommutative_graph_dim;
use crate::sdp::{SdpError, SolverConfig};
use crate::suite::{run_suite, SuiteReport, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_UNCERTIFIED: i32 = 3;

/// Largest number of grid points a sweep may request.
pub const MAX_SWEEP_POINTS: usize = 10_000;

#[derive(Parser, Debug)]
#[command(name = "qnscap", version)]
#[command(about = "Non-signalling assisted zero-error capacities of quantum channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Capacity report for one channel spec
    Compute {
        spec: PathBuf,
        /// Number of channel copies for the finite-n rate sample
        #[arg(long, default_value_t = 1)]
        copies: usize,
        #[arg(long, default_value_t = 1e-8)]
        gap_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        feas_tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Run the verification suite
    Verify {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Evaluate a channel family over a parameter grid, CSV on stdout
    Sweep {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e-8)]
        gap_tol: f64,
        #[arg(long, default_value_t = 1e-8)]
        feas_tol: f64,
    },
}

/// Rounds to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// The machine-readable `compute` report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub upsilon: f64,
    pub m0_qns: u64,
    pub dim_s: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m0_se: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0_se_bits: Option<f64>,
    pub unital: bool,
    pub choi_rank: usize,
    pub c0_qns_finite_n: Vec<(usize, f64)>,
    pub certified: bool,
    pub gap: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub discrepancies: Vec<String>,
}

impl ReportJson {
    pub fn from_report(r: &CapacityReport) -> Self {
        Self {
            upsilon: round12(r.upsilon),
            m0_qns: r.m0_qns,
            dim_s: r.dim_s,
            m0_se: r.m0_se,
            c0_se_bits: r.c0_se_bits.map(round12),
            unital: r.unital,
            choi_rank: r.choi_rank,
            c0_qns_finite_n: r.c0_qns_finite_n.iter().map(|&(n, v)| (n, round12(v))).collect(),
            certified: r.certified,
            gap: round12(r.gap),
            discrepancies: r.discrepancies.iter().map(ToString::to_string).collect(),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    return EXIT_OK;
                }
                _ => EXIT_INPUT,
            };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match cli.command {
        Command::Compute {
            spec,
            copies,
            gap_tol,
            feas_tol,
            json,
        } => config(gap_tol, feas_tol).and_then(|cfg| cmd_compute(&spec, copies, &cfg, json, out)),
        Command::Verify { seed, json } => cmd_verify(seed, json, out),
        Command::Sweep {
            spec,
            gap_tol,
            feas_tol,
        } => config(gap_tol, feas_tol).and_then(|cfg| cmd_sweep(&spec, &cfg, out)),
    };
    match result {
        Ok(code) => code,
        Err(CliError { code, message }) => {
            let _ = writeln!(err, "error: {message}");
            code
        }
    }
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }
}

impl From<CapacityError> for CliError {
    fn from(e: CapacityError) -> Self {
        let code = match e {
            CapacityError::SizeCap { .. }
            | CapacityError::OutOfRange(_)
            | CapacityError::Sdp(SdpError::TooLarge { .. }) => EXIT_INPUT,
            _ => EXIT_SOLVER,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(e: std::io::Error) -> CliError {
    CliError {
        code: EXIT_SOLVER,
        message: format!("writing output: {e}"),
    }
}

fn config(gap_tol: f64, feas_tol: f64) -> Result<SolverConfig, CliError> {
    let cfg = SolverConfig {
        gap_tol,
        feas_tol,
        ..SolverConfig::default()
    };
    cfg.validate().map_err(|e| CliError::input(e.to_string()))?;
    Ok(cfg)
}

fn read_file(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn load_channel(path: &Path) -> Result<Channel, CliError> {
    let bytes = read_file(path)?;
    let spec = parse_channel_spec(&bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    realize(&spec).map_err(|e| CliError::input(format!("{}: {e}", path.display())))
}

fn cmd_compute(
    path: &Path,
    copies: usize,
    cfg: &SolverConfig,
    json: bool,
    out: &mut dyn Write,
) -> Result<i32, CliError> {
    let ch = load_channel(path)?;
    if copies == 0 {
        return Err(CliError::input("--copies must be at least 1"));
    }
    let base = ch.dim_in() * ch.dim_out();
    let side = (0..copies).try_fold(1usize, |acc, _| acc.checked_mul(base).filter(|&s| s <= SIZE_CAP));
    if side.is_none() {
        return Err(CliError::input(format!(
            "--copies {copies} exceeds the size cap (d_in·d_out)^n ≤ {SIZE_CAP}"
        )));
    }
    let report = full_report(&ch, cfg, &[copies])?;
    let js = ReportJson::from_report(&report);
    if json {
        let text = serde_json::to_string_pretty(&js).map_err(|e| CliError {
            code: EXIT_SOLVER,
            message: e.to_string(),
        })?;
        writeln!(out, "{text}").map_err(io_error)?;
    } else {
        write_report_table(&js, out).map_err(io_error)?;
    }
    Ok(if report.certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn write_report_table(r: &ReportJson, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "{:<18}{}", "upsilon", r.upsilon)?;
    writeln!(out, "{:<18}{}", "m0_qns", r.m0_qns)?;
    writeln!(out, "{:<18}{}", "dim_s", r.dim_s)?;
    if let Some(v) = r.m0_se {
        writeln!(out, "{:<18}{v}", "m0_se")?;
    }
    if let Some(v) = r.c0_se_bits {
        writeln!(out, "{:<18}{v}", "c0_se_bits")?;
    }
    writeln!(out, "{:<18}{}", "unital", r.unital)?;
    writeln!(out, "{:<18}{}", "choi_rank", r.choi_rank)?;
    for (n, v) in &r.c0_qns_finite_n {
        writeln!(out, "{:<18}{v}", format!("c0_qns(n={n})"))?;
    }
    writeln!(out, "{:<18}{}", "certified", r.certified)?;
    writeln!(out, "{:<18}{:e}", "gap", r.gap)?;
    for d in &r.discrepancies {
        writeln!(out, "{:<18}{d}", "discrepancy")?;
    }
    Ok(())
}

fn cmd_verify(seed: u64, json: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let report = run_suite(seed, &SolverConfig::default());
    if json {
        write_suite_json(&report, out)?;
    } else {
        write_suite_table(&report, out).map_err(io_error)?;
    }
    Ok(if report.all_pass() { EXIT_OK } else { EXIT_UNCERTIFIED })
}

fn write_suite_json(report: &SuiteReport, out: &mut dyn Write) -> Result<(), CliError> {
    let v = serde_json::json!({
        "seed": report.seed,
        "all_pass": report.all_pass(),
        "rows": report.rows,
    });
    let text = serde_json::to_string_pretty(&v).map_err(|e| CliError {
        code: EXIT_SOLVER,
        message: e.to_string(),
    })?;
    writeln!(out, "{text}").map_err(io_error)
}

fn write_suite_table(report: &SuiteReport, out: &mut dyn Write) -> std::io::Result<()> {
    writeln!(out, "seed {}", report.seed)?;
    writeln!(out, "{:<5} {:<6} {:<42} {:<8} measured / expected", "", "id", "check", "tol")?;
    for r in &report.rows {
        writeln!(
            out,
            "{:<5} {:<6} {:<42} {:<8} {} / {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.name,
            r.tolerance,
            r.measured,
            r.expected
        )?;
    }
    Ok(())
}

/// One axis of a sweep grid: explicit values or an inclusive range.
#[derive(Debug, Clone, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Axis {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, step: f64 },
}

impl Axis {
    pub fn points(&self) -> Result<Vec<f64>, String> {
        let pts = match *self {
            Axis::Values(ref v) => v.clone(),
            Axis::Range { start, stop, step } => {
                if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
                    return Err(format!("bad range start={start} stop={stop} step={step}"));
                }
                let count = ((stop - start) / step + 1e-9).floor() + 1.0;
                if count > MAX_SWEEP_POINTS as f64 {
                    return Err(format!("range has more than {MAX_SWEEP_POINTS} points"));
                }
                (0..count as usize).map(|i| start + i as f64 * step).collect()
            }
        };
        if pts.is_empty() || pts.iter().any(|v| !v.is_finite()) {
            return Err("axis must contain finite values".into());
        }
        Ok(pts)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepRaw {
    family: String,
    grid: Value,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExtremalGrid {
    theta: Axis,
    phi: Axis,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct PauliEdgeGrid {
    t: Axis,
}

/// A parsed sweep: parameter names and one channel per grid point.
#[derive(Debug)]
pub struct Sweep {
    pub parameters: Vec<&'static str>,
    pub points: Vec<Vec<f64>>,
    family: Family,
}

#[derive(Debug, Clone, Copy)]
enum Family {
    Extremal,
    PauliEdge,
}

impl Sweep {
    pub fn channel(&self, point: &[f64]) -> Result<Channel, String> {
        match self.family {
            Family::Extremal => Ok(extremal_channel(point[0], point[1])),
            // p₀₀ = t on the identity, p₀₁ = 1 − t on Z.
            Family::PauliEdge => pauli_channel([point[0], 1.0 - point[0], 0.0, 0.0]).map_err(|e| e.to_string()),
        }
    }
}

/// Parses `{"family": "extremal" | "pauli_edge", "grid": {...}}`.
pub fn parse_sweep(text: &[u8]) -> Result<Sweep, String> {
    let raw: SweepRaw = serde_json::from_slice(text).map_err(|e| e.to_string())?;
    let sweep = match raw.family.as_str() {
        "extremal" => {
            let g: ExtremalGrid = serde_json::from_value(raw.grid).map_err(|e| e.to_string())?;
            let (thetas, phis) = (g.theta.points()?, g.phi.points()?);
            if thetas.len() * phis.len() > MAX_SWEEP_POINTS {
                return Err(format!("grid has more than {MAX_SWEEP_POINTS} points"));
            }
            let points = thetas
                .iter()
                .flat_map(|&t| phis.iter().map(move |&p| vec![t, p]))
                .collect();
            Sweep {
                parameters: vec!["theta", "phi"],
                points,
                family: Family::Extremal,
            }
        }
        "pauli_edge" => {
            let g: PauliEdgeGrid = serde_json::from_value(raw.grid).map_err(|e| e.to_string())?;
            let ts = g.t.points()?;
            if let Some(t) = ts.iter().find(|t| !(0.0..=1.0).contains(*t)) {
                return Err(format!("t = {t} outside [0, 1]"));
            }
            Sweep {
                parameters: vec!["t"],
                points: ts.into_iter().map(|t| vec![t]).collect(),
                family: Family::PauliEdge,
            }
        }
        other => return Err(format!("unknown family {other:?}")),
    };
    Ok(sweep)
}

fn cmd_sweep(path: &Path, cfg: &SolverConfig, out: &mut dyn Write) -> Result<i32, CliError> {
    let bytes = read_file(path)?;
    let sweep = parse_sweep(&bytes).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let channels = sweep
        .points
        .iter()
        .map(|p| sweep.channel(p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(CliError::input)?;
    let rows: Vec<Result<(f64, u64, usize, bool), CliError>> = channels
        .par_iter()
        .map(|ch| {
            let r = upsilon(ch, cfg)?;
            let dim = noncommutative_graph_dim(ch, DEFAULT_RANK_TOL).map_err(CapacityError::from)?;
            Ok((r.value, snap_floor(r.value), dim, r.certified))
        })
        .collect();

    let mut all_certified = true;
    writeln!(out, "{},upsilon,m0_qns,dim_s,certified", sweep.parameters.join(",")).map_err(io_error)?;
    for (point, r) in sweep.points.iter().zip(rows) {
        let (u, m0, dim, certified) = r?;
        all_certified &= certified;
        let params: Vec<String> = point.iter().map(|v| round12(*v).to_string()).collect();
        writeln!(out, "{},{},{m0},{dim},{certified}", params.join(","), round12(u)).map_err(io_error)?;
    }
    Ok(if all_certified { EXIT_OK } else { EXIT_UNCERTIFIED })
}
