//! `epoch-gph` command-line front end.
//!
//! Machine-readable output goes to stdout, diagnostics to stderr. Exit codes:
//! 0 on success, 2 on a usage error, 1 on a runtime or numerical failure.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;

use clap::{Args, CommandFactory, Parser, Subcommand};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{
    estimate_with_regressor, resolve_bandwidth, BandwidthRule, EstimateReport, Regressor,
};
use crate::model::ArfimaModel;
use crate::montecarlo::{emit_table, run_mc, McConfig};
use crate::simulate::{simulate_fractional, SimConfig, DEFAULT_BURN_IN};
use crate::spectral::{averaged_periodogram, EpochLayout};
use crate::theory::kernel::{finite_n_dft_covariance, limit_kernel, KernelQuery, KernelWhich};
use crate::theory::mse::{mse_prediction, MsePrediction};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "epoch-gph",
    version,
    about = "Epoch-averaged log-periodogram estimation of the memory parameter d"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one Gaussian ARFIMA(1,d,0) path as CSV `t,x`
    Simulate(SimulateArgs),
    /// Averaged periodogram of a CSV `t,x` series as CSV `k,omega,ibar`
    Periodogram(PeriodogramArgs),
    /// Estimate d from a CSV `t,x` series; prints JSON
    Estimate(EstimateArgs),
    /// Limit kernel D1/D2 or the exact finite-n DFT covariance; prints JSON
    Kernel(KernelArgs),
    /// Leading-order bias, variance and MSE; prints JSON
    PredictMse(PredictMseArgs),
    /// Monte Carlo study driven by a JSON config; prints CSV
    Montecarlo(MontecarloArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Series length N
    #[arg(long)]
    pub n: usize,
    /// Memory parameter, -0.5 < d < 0.5
    #[arg(long, allow_hyphen_values = true)]
    pub d: f64,
    /// AR(1) coefficient
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Innovation variance
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// RNG seed
    #[arg(long)]
    pub seed: u64,
    /// AR(1) burn-in discarded before the returned path
    #[arg(long, default_value_t = DEFAULT_BURN_IN)]
    pub burn_in: usize,
}

#[derive(Debug, Args)]
pub struct PeriodogramArgs {
    /// Number of epochs g (must divide N)
    #[arg(long)]
    pub epochs: usize,
    /// Input CSV with header `t,x` [default: stdin]
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Number of epochs g (must divide N)
    #[arg(long)]
    pub epochs: usize,
    /// optimal | pow:<alpha> | half | root-total | fixed:<m>
    #[arg(long, value_parser = parse_rule)]
    pub bandwidth: BandwidthRule,
    /// Memory parameter of the model (required with --bandwidth optimal)
    #[arg(
        long,
        allow_hyphen_values = true,
        required_if_eq("bandwidth", "optimal")
    )]
    pub d: Option<f64>,
    /// AR(1) coefficient of the model (required with --bandwidth optimal)
    #[arg(
        long,
        allow_hyphen_values = true,
        required_if_eq("bandwidth", "optimal")
    )]
    pub phi: Option<f64>,
    /// log-frequency (-2 log w_k) or log-sine (-2 log|2 sin(w_k/2)|)
    #[arg(long, default_value = "log-frequency", value_parser = parse_regressor)]
    pub regressor: Regressor,
    /// Input CSV with header `t,x` [default: stdin]
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct KernelArgs {
    /// Memory parameter, -0.5 < d < 0.5
    #[arg(long, allow_hyphen_values = true)]
    pub d: f64,
    /// First Fourier index (1 <= j <= k)
    #[arg(long)]
    pub j: usize,
    /// Second Fourier index
    #[arg(long)]
    pub k: usize,
    /// Epoch offset
    #[arg(long, default_value_t = 0)]
    pub ell: usize,
    /// d1 | d2 | finite:<n>
    #[arg(long, value_parser = parse_which)]
    pub which: Which,
    /// AR(1) coefficient
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Use the unconjugated finite-n covariance (the D2 counterpart)
    #[arg(long)]
    pub unconjugated: bool,
}

#[derive(Debug, Args)]
pub struct PredictMseArgs {
    /// Memory parameter
    #[arg(long, allow_hyphen_values = true)]
    pub d: f64,
    /// AR(1) coefficient
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub phi: f64,
    /// Total length N; the epoch length is N / g
    #[arg(long)]
    pub n: usize,
    /// Number of epochs
    #[arg(long, default_value_t = 1)]
    pub g: usize,
    /// Evaluate at this bandwidth instead of the optimal one
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct MontecarloArgs {
    /// JSON config (fields of McConfig)
    #[arg(long)]
    pub config: PathBuf,
    /// Write the CSV table here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    D1,
    D2,
    Finite(usize),
}

fn parse_rule(s: &str) -> std::result::Result<BandwidthRule, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_regressor(s: &str) -> std::result::Result<Regressor, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_which(s: &str) -> std::result::Result<Which, String> {
    match s {
        "d1" => Ok(Which::D1),
        "d2" => Ok(Which::D2),
        _ => s
            .strip_prefix("finite:")
            .and_then(|n| n.parse().ok())
            .map(Which::Finite)
            .ok_or_else(|| format!("expected d1, d2 or finite:<n>, got '{s}'")),
    }
}

#[derive(Debug, Deserialize)]
struct Row {
    t: u64,
    x: f64,
}

/// Reads a `t,x` CSV; `t` must run 1, 2, ..., N.
pub fn read_series<R: Read>(reader: R) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "x" {
        return Err(Error::InvalidArgument(format!(
            "expected CSV header 't,x', found '{}'",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut x = Vec::new();
    for row in rdr.deserialize() {
        let row: Row = row?;
        if row.t != x.len() as u64 + 1 {
            return Err(Error::InvalidArgument(format!(
                "row {} has t = {}, expected {}",
                x.len() + 1,
                row.t,
                x.len() + 1
            )));
        }
        x.push(row.x);
    }
    Ok(x)
}

pub fn write_series<W: Write>(out: &mut W, x: &[f64]) -> Result<()> {
    writeln!(out, "t,x")?;
    for (i, v) in x.iter().enumerate() {
        writeln!(out, "{},{}", i + 1, v)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct EstimateOutput<'a> {
    schema_version: u32,
    bandwidth: BandwidthRule,
    #[serde(flatten)]
    report: &'a EstimateReport,
}

#[derive(Serialize)]
struct ComplexJson {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

#[derive(Serialize)]
struct KernelOutput {
    schema_version: u32,
    which: String,
    d: f64,
    j: usize,
    k: usize,
    ell: usize,
    value: ComplexJson,
    /// `f*(0) (2 pi j)^d (2 pi k)^d / (2 pi)` times D for the limits,
    /// `w_j^d w_k^d` times the covariance for finite n; the two are
    /// comparable
    normalized: ComplexJson,
    error: f64,
}

#[derive(Serialize)]
struct PredictOutput<'a> {
    schema_version: u32,
    total_length: usize,
    epoch_length: usize,
    g: usize,
    #[serde(flatten)]
    prediction: &'a MsePrediction,
}

fn open_input(path: &Option<PathBuf>, stdin: &mut dyn Read) -> Result<Vec<f64>> {
    match path {
        Some(p) => read_series(File::open(p)?),
        None => read_series(stdin),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

/// Runs a parsed command.
pub fn run(command: Command, stdin: &mut dyn Read, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Simulate(a) => {
            let model = ArfimaModel::new(a.d, a.phi, a.sigma2)?;
            let cfg = SimConfig {
                model,
                length: a.n,
                seed: a.seed,
                burn_in: a.burn_in,
            };
            let x = simulate_fractional(&cfg)?;
            let mut out = BufWriter::new(stdout);
            write_series(&mut out, &x)?;
            out.flush()?;
        }
        Command::Periodogram(a) => {
            let x = open_input(&a.input, stdin)?;
            let layout = EpochLayout::new(x.len(), a.epochs)?;
            let ibar = averaged_periodogram(&x, &layout)?;
            let mut out = BufWriter::new(stdout);
            writeln!(out, "k,omega,ibar")?;
            for (i, (w, v)) in ibar.frequencies.iter().zip(&ibar.ordinates).enumerate() {
                writeln!(out, "{},{},{}", i + 1, w, v)?;
            }
            out.flush()?;
        }
        Command::Estimate(a) => {
            let x = open_input(&a.input, stdin)?;
            let model = match (a.d, a.phi) {
                (Some(d), phi) => Some(ArfimaModel::new(d, phi.unwrap_or(0.0), 1.0)?),
                (None, Some(phi)) => Some(ArfimaModel::new(0.0, phi, 1.0)?),
                (None, None) => None,
            };
            let layout = EpochLayout::new(x.len(), a.epochs)?;
            let ibar = averaged_periodogram(&x, &layout)?;
            let m = resolve_bandwidth(a.bandwidth, &layout, model.as_ref())?;
            let report = estimate_with_regressor(&ibar, m, a.regressor)?;
            write_json(
                stdout,
                &EstimateOutput {
                    schema_version: SCHEMA_VERSION,
                    bandwidth: a.bandwidth,
                    report: &report,
                },
            )?;
        }
        Command::Kernel(a) => {
            let (value, normalized, error, which) = match a.which {
                Which::D1 | Which::D2 => {
                    let q = KernelQuery::new(a.d, a.j, a.k, a.ell)?;
                    let (w, name) = if a.which == Which::D1 {
                        (KernelWhich::D1, "d1")
                    } else {
                        (KernelWhich::D2, "d2")
                    };
                    let v = limit_kernel(q, w)?;
                    let f0 = ArfimaModel::new(a.d, a.phi, 1.0)?.f_star_zero();
                    (
                        v.value,
                        v.value * q.limit_scale() * f0,
                        v.error,
                        name.to_string(),
                    )
                }
                Which::Finite(n) => {
                    let model = ArfimaModel::new(a.d, a.phi, 1.0)?;
                    let v = finite_n_dft_covariance(&model, n, a.j, a.k, a.ell, !a.unconjugated)?;
                    let w = |i: usize| 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                    let scale = w(a.j).powf(a.d) * w(a.k).powf(a.d);
                    (v.value, v.value * scale, v.error, format!("finite:{n}"))
                }
            };
            write_json(
                stdout,
                &KernelOutput {
                    schema_version: SCHEMA_VERSION,
                    which,
                    d: a.d,
                    j: a.j,
                    k: a.k,
                    ell: a.ell,
                    value: value.into(),
                    normalized: normalized.into(),
                    error,
                },
            )?;
        }
        Command::PredictMse(a) => {
            let model = ArfimaModel::new(a.d, a.phi, 1.0)?;
            let layout = EpochLayout::new(a.n, a.g)?;
            let p = mse_prediction(&model, layout.epoch_length(), a.g, a.m)?;
            write_json(
                stdout,
                &PredictOutput {
                    schema_version: SCHEMA_VERSION,
                    total_length: a.n,
                    epoch_length: layout.epoch_length(),
                    g: a.g,
                    prediction: &p,
                },
            )?;
        }
        Command::Montecarlo(a) => {
            let text = std::fs::read_to_string(&a.config)?;
            let cfg: McConfig = serde_json::from_str(&text)?;
            let table = emit_table(&run_mc(&cfg)?)?;
            match a.out {
                Some(p) => std::fs::write(p, table)?,
                None => stdout.write_all(table.as_bytes())?,
            }
        }
    }
    Ok(())
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn dispatch<I, T>(
    args: I,
    stdin: &mut dyn Read,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
                2
            } else {
                // --help and --version
                let _ = write!(stdout, "{rendered}");
                0
            };
        }
    };
    match run(cli.command, stdin, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            1
        }
    }
}

/// Help text of one subcommand, as printed by `epoch-gph <name> --help`.
pub fn subcommand_help(name: &str) -> Option<String> {
    let mut cmd = Cli::command();
    cmd.build();
    cmd.find_subcommand_mut(name)
        .map(|c| c.render_help().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str], input: &str) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["epoch-gph"];
        argv.extend_from_slice(args);
        let code = dispatch(argv, &mut input.as_bytes(), &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn simulate_row_count() {
        let (code, out, _) = call(&["simulate", "--n", "512", "--d", "0.3", "--seed", "7"], "");
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 513);
        assert_eq!(lines[0], "t,x");
        assert!(lines[512].starts_with("512,"));
    }

    #[test]
    fn estimate_half_on_512() {
        let (_, csv, _) = call(&["simulate", "--n", "512", "--d", "0.3", "--seed", "7"], "");
        let (code, out, err) = call(&["estimate", "--epochs", "2", "--bandwidth", "half"], &csv);
        assert_eq!(code, 0, "{err}");
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["m"], 127);
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["bandwidth"], "half");
    }

    #[test]
    fn predict_mse_optimal() {
        let (code, out, _) = call(
            &[
                "predict-mse",
                "--d",
                "0.3",
                "--phi",
                "-0.3",
                "--n",
                "512",
                "--g",
                "1",
            ],
            "",
        );
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["optimal_m"], 103);
    }

    #[test]
    fn usage_errors_exit_2() {
        let (code, _, err) = call(&["estimate", "--epochs", "2", "--bandwidth", "optimal"], "");
        assert_eq!(code, 2);
        assert!(err.contains("--d") || err.contains("--phi"));
        let (code, _, err) = call(&["estimate", "--epochs", "2", "--bandwidth", "wide"], "");
        assert_eq!(code, 2);
        assert!(err.contains("--bandwidth") && err.contains("pow:<alpha>"));
        let (code, _, _) = call(
            &[
                "simulate", "--n", "8", "--d", "0.3", "--seed", "1", "--bogus",
            ],
            "",
        );
        assert_eq!(code, 2);
        let (code, _, _) = call(
            &[
                "kernel", "--d", "0.3", "--j", "1", "--k", "1", "--which", "d3",
            ],
            "",
        );
        assert_eq!(code, 2);
    }

    #[test]
    fn runtime_errors_exit_1() {
        let (_, csv, _) = call(&["simulate", "--n", "30", "--d", "0.3", "--seed", "7"], "");
        let (code, out, err) = call(&["estimate", "--epochs", "4", "--bandwidth", "half"], &csv);
        assert_eq!(code, 1);
        assert!(out.is_empty() && err.starts_with("error:"));
        let (code, _, _) = call(&["simulate", "--n", "30", "--d", "0.6", "--seed", "7"], "");
        assert_eq!(code, 1);
        let (code, _, _) = call(&["periodogram", "--epochs", "1"], "t,y\n1,0.5\n");
        assert_eq!(code, 1);
        let (code, _, _) = call(&["periodogram", "--epochs", "1"], "t,x\n1,0.5\n3,0.5\n");
        assert_eq!(code, 1);
    }

    #[test]
    fn help_exits_0() {
        let (code, out, _) = call(&["kernel", "--help"], "");
        assert_eq!(code, 0);
        assert!(out.contains("--which"));
    }

    #[test]
    fn which_parsing() {
        assert_eq!(parse_which("d1"), Ok(Which::D1));
        assert_eq!(parse_which("finite:64"), Ok(Which::Finite(64)));
        assert!(parse_which("finite:").is_err());
    }
}
