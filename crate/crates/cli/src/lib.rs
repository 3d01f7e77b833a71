//! The `hgd` command line: simulate von Mises data, fit it, and benchmark
//! the fitting methods against each other.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use hgd_core::bench::{constraint_set, TrialRecord, VmConstraint};
use hgd_core::{
    fit_vm, run_benchmark, sufficient_stats, vm_sample, AngleData, BenchSpec, Method, Minimum,
    OptimizerConfig, PenaltyConfig, Status, SufficientStats, VmParams,
};
use serde::{Deserialize, Serialize};

pub const EXIT_SPEC: i32 = 2;
pub const EXIT_OPTIMIZER: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("optimizer failure: {0}")]
    Optimizer(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) => EXIT_SPEC,
            CliError::Optimizer(_) => EXIT_OPTIMIZER,
            CliError::Io { .. } | CliError::Output(_) => EXIT_IO,
        }
    }

    fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<hgd_core::Error> for CliError {
    fn from(e: hgd_core::Error) -> Self {
        use hgd_core::Error as E;
        match e {
            E::InvalidConfig(_)
            | E::DimensionMismatch { .. }
            | E::Parse(_)
            | E::EmptyData
            | E::SingularPoint { .. } => CliError::Spec(e.to_string()),
            E::SingularPath { .. } | E::SingularHessian { .. } | E::LineSearchFailed { .. } => {
                CliError::Optimizer(e.to_string())
            }
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "hgd",
    version,
    about = "Holonomic gradient descent for the von Mises MLE"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a von Mises sample and write one angle per line.
    Simulate(SimulateArgs),
    /// Fit the von Mises model to a data file or a simulated sample.
    Fit(FitArgs),
    /// Paired runtime benchmark of the fitting methods.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SampleArgs {
    /// Concentration of the sampling distribution.
    #[arg(long, default_value_t = 5.0)]
    pub kappa: f64,
    /// Mean direction of the sampling distribution (radians).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_hyphen_values = true)]
    pub mu: f64,
    /// Sample size.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub sample: SampleArgs,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct TuningArgs {
    /// Starting point `theta1,theta2`.
    #[arg(long, default_value = "-2,0.1", value_parser = parse_pair, allow_hyphen_values = true)]
    pub x0: [f64; 2],
    /// `linear a b c` (a·θ₁ + b·θ₂ + c ≤ 0) or `disk r` (‖θ‖ ≤ r); repeatable.
    /// Only `chgd` takes constraints; `bench` gives it `disk 10` by default.
    #[arg(long = "constraint", allow_hyphen_values = true)]
    pub constraints: Vec<VmConstraint>,
    #[arg(long, default_value_t = PenaltyConfig::default().rho)]
    pub rho: f64,
    #[arg(long, default_value_t = PenaltyConfig::default().xi)]
    pub xi: f64,
    #[arg(long, default_value_t = PenaltyConfig::default().shrink)]
    pub shrink: f64,
    #[arg(long, default_value_t = OptimizerConfig::default().max_iters)]
    pub max_iters: usize,
    #[arg(long, default_value_t = OptimizerConfig::default().grad_tol)]
    pub grad_tol: f64,
}

impl TuningArgs {
    pub fn optimizer(&self) -> OptimizerConfig {
        OptimizerConfig {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            ..OptimizerConfig::default()
        }
    }

    pub fn penalty(&self) -> PenaltyConfig {
        PenaltyConfig {
            rho: self.rho,
            xi: self.xi,
            shrink: self.shrink,
            ..PenaltyConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    #[arg(long, default_value = "hgd")]
    pub method: Method,
    /// Data file with one angle (radians) per line; simulated when omitted.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub sample: SampleArgs,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Write the iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Write the JSON summary here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, default_value_t = 500)]
    pub trials: usize,
    /// Comma separated list of methods.
    #[arg(long, default_value = "hgd,chgd,newton", value_delimiter = ',')]
    pub methods: Vec<Method>,
    #[arg(long, default_value_t = BenchSpec::default().kappa)]
    pub kappa: f64,
    #[arg(long, default_value_t = BenchSpec::default().mu, allow_hyphen_values = true)]
    pub mu: f64,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Trial `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub tuning: TuningArgs,
    /// Write the raw per-trial results as CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_pair(s: &str) -> std::result::Result<[f64; 2], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [a, b] => {
            let a = a.parse().map_err(|e| format!("{a:?}: {e}"))?;
            let b = b.parse().map_err(|e| format!("{b:?}: {e}"))?;
            Ok([a, b])
        }
        _ => Err(format!("expected two comma separated numbers, got {s:?}")),
    }
}

/// One row of the trace CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub k: usize,
    pub theta1: f64,
    pub theta2: f64,
    #[serde(rename = "L")]
    pub l: f64,
    pub grad_norm: f64,
    pub alpha: f64,
    pub penalty: Option<f64>,
    pub feasible: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Natural {
    pub theta1: f64,
    pub theta2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Polar {
    pub kappa: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataSummary {
    pub n: usize,
    pub c_bar: f64,
    pub s_bar: f64,
}

impl From<&SufficientStats> for DataSummary {
    fn from(s: &SufficientStats) -> Self {
        DataSummary {
            n: s.n,
            c_bar: s.c_bar,
            s_bar: s.s_bar,
        }
    }
}

/// JSON summary written by `hgd fit`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub method: String,
    pub status: String,
    pub converged: bool,
    pub iterations: usize,
    pub estimate: Natural,
    pub polar: Polar,
    pub objective: f64,
    pub feasible: bool,
    pub constraints: Vec<String>,
    /// The fitted concentration is too close to 0 for the mean direction to
    /// be meaningful.
    pub degenerate: bool,
    pub wall_seconds: f64,
    pub data: DataSummary,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Simulate(args) => simulate(&args),
        Command::Fit(args) => fit(&args).map(|_| ()),
        Command::Bench(args) => bench(&args),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn write_stdout(contents: &str) -> Result<()> {
    io::stdout()
        .write_all(contents.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

pub fn simulate(args: &SimulateArgs) -> Result<()> {
    let s = &args.sample;
    let data = vm_sample(s.kappa, s.mu, s.n, s.seed)?;
    let stats = sufficient_stats(&data)?;
    let text = data.to_text();
    let line = serde_json::to_string(&DataSummary::from(&stats))?;
    match &args.out {
        Some(path) => {
            write_file(path, text.as_bytes())?;
            write_stdout(&format!("{line}\n"))
        }
        None => write_stdout(&text),
    }
}

pub fn load_data(path: &Path) -> Result<AngleData> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    Ok(AngleData::parse(&text)?)
}

pub fn trace_rows(m: &Minimum) -> Vec<TraceRow> {
    m.trace
        .records
        .iter()
        .map(|r| TraceRow {
            k: r.k,
            theta1: r.point[0],
            theta2: r.point[1],
            l: r.objective,
            grad_norm: r.grad_norm,
            alpha: r.alpha,
            penalty: r.penalty,
            feasible: r.feasible,
        })
        .collect()
}

fn write_trace(path: &Path, rows: &[TraceRow]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn fit(args: &FitArgs) -> Result<FitSummary> {
    let data = match &args.data {
        Some(path) => load_data(path)?,
        None => {
            let s = &args.sample;
            vm_sample(s.kappa, s.mu, s.n, s.seed)?
        }
    };
    let stats = sufficient_stats(&data)?;
    let cfg = args.tuning.optimizer();
    let pcfg = args.tuning.penalty();
    let constraints = &args.tuning.constraints;

    let start = Instant::now();
    let m = fit_vm(
        args.method,
        &stats,
        args.tuning.x0,
        constraints,
        &cfg,
        &pcfg,
    )?;
    let wall_seconds = start.elapsed().as_secs_f64();

    let point = [m.point()[0], m.point()[1]];
    let (kappa, mu) = VmParams::from(point).to_polar();
    let summary = FitSummary {
        method: args.method.to_string(),
        status: m.status.as_str().to_string(),
        converged: m.status.is_converged(),
        iterations: m.iterations,
        estimate: Natural {
            theta1: point[0],
            theta2: point[1],
        },
        polar: Polar { kappa, mu },
        objective: m.state.objective(),
        feasible: constraint_set(constraints).is_feasible(&point),
        constraints: constraints.iter().map(ToString::to_string).collect(),
        degenerate: kappa < cfg.integrator.singular_clearance,
        wall_seconds,
        data: DataSummary::from(&stats),
    };

    if let Some(path) = &args.trace {
        write_trace(path, &trace_rows(&m))?;
    }
    let json = serde_json::to_string_pretty(&summary)?;
    match &args.out {
        Some(path) => write_file(path, format!("{json}\n").as_bytes())?,
        None => write_stdout(&format!("{json}\n"))?,
    }

    if summary.degenerate {
        eprintln!("warning: fitted concentration is near 0; the mean direction is undefined");
    }
    match m.status {
        Status::GradientTolerance | Status::StepTolerance => Ok(summary),
        // With an active constraint the Newton direction keeps pointing out
        // of the feasible set and backtracking ends at the boundary.
        Status::LineSearchFailed => {
            eprintln!(
                "warning: line search stalled after {} iterations; reporting the best iterate",
                m.iterations
            );
            Ok(summary)
        }
        Status::MaxItersExceeded => Err(CliError::Optimizer(format!(
            "no convergence within {} iterations",
            cfg.max_iters
        ))),
    }
}

#[derive(Debug, Serialize)]
struct TrialRow<'a> {
    trial: usize,
    seed: u64,
    method: &'a str,
    seconds: f64,
    theta1: Option<f64>,
    theta2: Option<f64>,
    iterations: Option<usize>,
    status: Option<&'a str>,
    error: Option<&'a str>,
}

impl<'a> From<&'a TrialRecord> for TrialRow<'a> {
    fn from(t: &'a TrialRecord) -> Self {
        TrialRow {
            trial: t.trial,
            seed: t.seed,
            method: t.method.as_str(),
            seconds: t.seconds,
            theta1: t.estimate.map(|e| e[0]),
            theta2: t.estimate.map(|e| e[1]),
            iterations: t.iterations,
            status: t.status.map(Status::as_str),
            error: t.error.as_deref(),
        }
    }
}

pub fn bench_spec(args: &BenchArgs) -> BenchSpec {
    let constraints = if args.tuning.constraints.is_empty() {
        BenchSpec::default().constraints
    } else {
        args.tuning.constraints.clone()
    };
    BenchSpec {
        trials: args.trials,
        methods: args.methods.clone(),
        kappa: args.kappa,
        mu: args.mu,
        n: args.n,
        seed: args.seed,
        x0: args.tuning.x0,
        constraints,
        optimizer: args.tuning.optimizer(),
        penalty: args.tuning.penalty(),
    }
}

pub fn bench(args: &BenchArgs) -> Result<()> {
    let spec = bench_spec(args);
    let report = run_benchmark(&spec)?;

    let mut table = format!(
        "{:<8} {:>14} {:>12} {:>12} {:>8} {:>8}\n",
        "method", "mean time (s)", "theta1", "theta2", "ok", "failed"
    );
    for s in &report.summaries {
        table.push_str(&format!(
            "{:<8} {:>14.6e} {:>12.6} {:>12.6} {:>8} {:>8}\n",
            s.method.as_str(),
            s.mean_seconds,
            s.mean_estimate[0],
            s.mean_estimate[1],
            s.succeeded,
            s.failures
        ));
    }
    table.push_str(&format!(
        "{} trials, {} failures\n",
        spec.trials,
        report.failures()
    ));
    write_stdout(&table)?;

    if let Some(path) = &args.out {
        let file = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = csv::Writer::from_writer(file);
        for t in &report.trials {
            w.serialize(TrialRow::from(t))?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}
