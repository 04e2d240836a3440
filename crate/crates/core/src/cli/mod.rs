//! Command-line front end.
//!
//! Exit codes: 0 converged, 2 not converged or numerical failure, 64 usage
//! error, 66 unreadable or invalid input file.

mod bench;

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use bench::{bench_table, Table, TableId, DEFAULT_TRIDIAGONAL_SEED};

use crate::diagnostics::{emit_report, reference_eigenpair, ConvergenceReport, ReportFormat};
use crate::error::Error;
use crate::grid::{l_shape, load_mask, unit_square};
use crate::iteration::{
    collatz_wielandt, fixed_shift_power, plain_power, rayleigh_quotient_iteration,
    variable_lambda_power, Criterion, SolverConfig, Update, DEFAULT_EPSILON, DEFAULT_MAX_ITERS,
};
use crate::operators::{
    hilbert_matrix, random_tridiagonal, DenseMatrix, InverseLaplacian, OperatorKind,
    PositiveOperator,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NOT_CONVERGED: i32 = 2;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_INPUT: i32 = 66;

/// Error with the exit code it maps to.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn input(err: Error) -> Self {
        Self {
            code: EXIT_INPUT,
            message: err.to_string(),
        }
    }
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::Io { .. } | Error::Parse { .. } => EXIT_INPUT,
            Error::Config(_) | Error::UnsupportedCriterion { .. } => EXIT_USAGE,
            _ => EXIT_NOT_CONVERGED,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

/// Problem selector, `kind:args`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Problem {
    Hilbert(usize),
    Tridiagonal(usize, Option<u64>),
    MatrixFile(PathBuf),
    UnitSquare(f64),
    LShape(f64),
    MaskFile(PathBuf),
}

/// Accepts a decimal or `1/k`.
fn parse_spacing(s: &str) -> Result<f64, String> {
    let h = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| format!("bad spacing {s:?}"))?;
            let b: f64 = b.trim().parse().map_err(|_| format!("bad spacing {s:?}"))?;
            a / b
        }
        None => s.parse().map_err(|_| format!("bad spacing {s:?}"))?,
    };
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(format!("spacing must be positive, got {s:?}"))
    }
}

impl FromStr for Problem {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| {
            format!("problem {s:?} must look like hilbert:N, tridiagonal:N[:SEED], matrix:PATH, unit-square:H, l-shape:H or mask:PATH")
        })?;
        let int = |x: &str| {
            x.parse::<usize>()
                .map_err(|_| format!("bad size {x:?} in {s:?}"))
        };
        match kind {
            "hilbert" => Ok(Problem::Hilbert(int(rest)?)),
            "tridiagonal" => match rest.split_once(':') {
                Some((n, seed)) => Ok(Problem::Tridiagonal(
                    int(n)?,
                    Some(seed.parse().map_err(|_| format!("bad seed {seed:?}"))?),
                )),
                None => Ok(Problem::Tridiagonal(int(rest)?, None)),
            },
            "matrix" => Ok(Problem::MatrixFile(rest.into())),
            "unit-square" => Ok(Problem::UnitSquare(parse_spacing(rest)?)),
            "l-shape" => Ok(Problem::LShape(parse_spacing(rest)?)),
            "mask" => Ok(Problem::MaskFile(rest.into())),
            other => Err(format!("unknown problem kind {other:?}")),
        }
    }
}

impl TryFrom<String> for Problem {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<Problem> for String {
    fn from(p: Problem) -> String {
        p.to_string()
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Problem::Hilbert(n) => write!(f, "hilbert:{n}"),
            Problem::Tridiagonal(n, Some(seed)) => write!(f, "tridiagonal:{n}:{seed}"),
            Problem::Tridiagonal(n, None) => write!(f, "tridiagonal:{n}"),
            Problem::MatrixFile(p) => write!(f, "matrix:{}", p.display()),
            Problem::UnitSquare(h) => write!(f, "unit-square:{h}"),
            Problem::LShape(h) => write!(f, "l-shape:{h}"),
            Problem::MaskFile(p) => write!(f, "mask:{}", p.display()),
        }
    }
}

impl Problem {
    fn reads_file(&self) -> bool {
        matches!(self, Problem::MatrixFile(_) | Problem::MaskFile(_))
    }

    pub fn build(&self, default_seed: u64) -> Result<Box<dyn PositiveOperator>, CliError> {
        let built: crate::Result<Box<dyn PositiveOperator>> = match self {
            Problem::Hilbert(n) => hilbert_matrix(*n).map(|m| Box::new(m) as _),
            Problem::Tridiagonal(n, seed) => {
                random_tridiagonal(*n, seed.unwrap_or(default_seed)).map(|m| Box::new(m) as _)
            }
            Problem::MatrixFile(p) => DenseMatrix::load(p).map(|m| Box::new(m) as _),
            Problem::UnitSquare(h) => unit_square(*h)
                .and_then(InverseLaplacian::new)
                .map(|m| Box::new(m) as _),
            Problem::LShape(h) => l_shape(*h)
                .and_then(InverseLaplacian::new)
                .map(|m| Box::new(m) as _),
            Problem::MaskFile(p) => load_mask(p)
                .and_then(InverseLaplacian::new)
                .map(|m| Box::new(m) as _),
        };
        built.map_err(|e| {
            if self.reads_file() {
                CliError::input(e)
            } else {
                CliError::usage(e.to_string())
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoArg {
    Cw,
    Rayleigh,
    Power,
    FixedShift,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateArg {
    Sup,
    Mu,
}

impl From<UpdateArg> for Update {
    fn from(u: UpdateArg) -> Self {
        match u {
            UpdateArg::Sup => Update::Sup,
            UpdateArg::Mu => Update::Mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CriterionArg {
    Sc1,
    Sc2,
    Dlambda,
    Residual,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Sc1 => Criterion::Sc1,
            CriterionArg::Sc2 => Criterion::Sc2,
            CriterionArg::Dlambda => Criterion::LambdaDiff,
            CriterionArg::Residual => Criterion::Residual,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputArg {
    Text,
    Csv,
    Md,
    Json,
}

/// Start vector selector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum StartVector {
    Ones,
    /// `T·1`; grid operators only.
    TOne,
    File(PathBuf),
}

impl FromStr for StartVector {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "ones" => Ok(StartVector::Ones),
            "t-one" => Ok(StartVector::TOne),
            _ => match s.strip_prefix("file:") {
                Some(p) if !p.is_empty() => Ok(StartVector::File(p.into())),
                _ => Err(format!(
                    "start vector {s:?} must be ones, t-one or file:PATH"
                )),
            },
        }
    }
}

impl TryFrom<String> for StartVector {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        s.parse()
    }
}

impl From<StartVector> for String {
    fn from(v: StartVector) -> String {
        match v {
            StartVector::Ones => "ones".into(),
            StartVector::TOne => "t-one".into(),
            StartVector::File(p) => format!("file:{}", p.display()),
        }
    }
}

/// Tolerance: a number, or `h2/10` for `h²/10` on grid problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TolInput")]
pub enum Tolerance {
    Value(f64),
    QuickMesh,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum TolInput {
    Num(f64),
    Text(String),
}

impl TryFrom<TolInput> for Tolerance {
    type Error = String;

    fn try_from(t: TolInput) -> Result<Self, String> {
        match t {
            TolInput::Num(x) => Ok(Tolerance::Value(x)),
            TolInput::Text(s) => s.parse(),
        }
    }
}

impl FromStr for Tolerance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s == "h2/10" {
            return Ok(Tolerance::QuickMesh);
        }
        let x: f64 = s.parse().map_err(|_| format!("bad tolerance {s:?}"))?;
        if x > 0.0 && x.is_finite() {
            Ok(Tolerance::Value(x))
        } else {
            Err(format!("tolerance must be positive, got {s:?}"))
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "cwpower",
    version,
    about = "Principal eigenpairs by variable-shift Collatz-Wielandt power iteration"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one iteration and print its trace.
    Solve(SolveArgs),
    /// Print the Collatz-Wielandt bounds of the start vector.
    Bounds(BoundsArgs),
    /// Reproduce one of the convergence tables.
    Bench(BenchArgs),
}

#[derive(Debug, Args, Default)]
pub struct SolveArgs {
    /// hilbert:N, tridiagonal:N[:SEED], matrix:PATH, unit-square:H, l-shape:H, mask:PATH
    #[arg(long)]
    pub problem: Option<Problem>,
    #[arg(long, value_enum)]
    pub algo: Option<AlgoArg>,
    #[arg(long, value_enum)]
    pub update: Option<UpdateArg>,
    #[arg(long, value_enum)]
    pub criterion: Option<CriterionArg>,
    /// Positive tolerance, or h2/10 on grid problems.
    #[arg(long)]
    pub eps: Option<Tolerance>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// ones, t-one (grid problems) or file:PATH
    #[arg(long)]
    pub v0: Option<StartVector>,
    /// Seed for tridiagonal problems without an explicit seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Shift for --algo fixed-shift.
    #[arg(long)]
    pub shift: Option<f64>,
    #[arg(long, value_enum)]
    pub output: Option<OutputArg>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML file with the same fields; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Skip the reference eigenvalue and the error column.
    #[arg(long)]
    pub no_reference: bool,
    /// Include wall-clock time (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    #[arg(long)]
    pub problem: Problem,
    #[arg(long, default_value = "ones")]
    pub v0: StartVector,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "text")]
    pub output: OutputArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(value_enum)]
    pub table: TableId,
    /// Seed of the tridiagonal instance.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "md")]
    pub output: OutputArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Config file contents; every field optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub problem: Option<Problem>,
    pub algo: Option<AlgoArg>,
    pub update: Option<UpdateArg>,
    pub criterion: Option<CriterionArg>,
    pub eps: Option<Tolerance>,
    pub max_iters: Option<usize>,
    pub v0: Option<StartVector>,
    pub seed: Option<u64>,
    pub shift: Option<f64>,
    pub output: Option<OutputArg>,
    pub record_trace: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    Cw,
    Rayleigh,
    Power,
    FixedShift(f64),
}

/// A fully resolved run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: Problem,
    pub algorithm: Algorithm,
    pub config: SolverConfig,
    pub v0: StartVector,
    pub seed: u64,
    pub output: OutputArg,
    /// `ε = h²/10` on grid problems.
    pub quick_tolerance: bool,
}

fn load_config(path: &Path) -> Result<ConfigFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        CliError::input(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    toml::from_str(&text).map_err(|e| CliError {
        code: EXIT_INPUT,
        message: format!("{}: {e}", path.display()),
    })
}

impl ExperimentSpec {
    /// Merges flags over the config file over defaults.
    pub fn resolve(args: &SolveArgs) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => load_config(p)?,
            None => ConfigFile::default(),
        };
        let problem = args
            .problem
            .clone()
            .or(file.problem)
            .ok_or_else(|| CliError::usage("--problem is required"))?;
        let is_grid = matches!(
            problem,
            Problem::UnitSquare(_) | Problem::LShape(_) | Problem::MaskFile(_)
        );
        let kind = if is_grid {
            OperatorKind::InverseLaplacian
        } else {
            OperatorKind::DenseMatrix
        };
        let mut config = SolverConfig::for_kind(kind);
        if let Some(u) = args.update.or(file.update) {
            config.update = u.into();
        }
        if let Some(c) = args.criterion.or(file.criterion) {
            config.stopping.criterion = c.into();
        }
        config.stopping.max_iters = args
            .max_iters
            .or(file.max_iters)
            .unwrap_or(DEFAULT_MAX_ITERS);
        config.record_trace = file.record_trace.unwrap_or(true);
        let mut quick_tolerance = false;
        config.stopping.epsilon = match args
            .eps
            .or(file.eps)
            .unwrap_or(Tolerance::Value(DEFAULT_EPSILON))
        {
            Tolerance::Value(x) => x,
            Tolerance::QuickMesh if is_grid => {
                quick_tolerance = true;
                DEFAULT_EPSILON
            }
            Tolerance::QuickMesh => {
                return Err(CliError::usage("--eps h2/10 applies to grid problems only"))
            }
        };
        config
            .stopping
            .validate()
            .map_err(|e| CliError::usage(e.to_string()))?;
        let shift = args.shift.or(file.shift);
        let algorithm = match args.algo.or(file.algo).unwrap_or(AlgoArg::Cw) {
            AlgoArg::Cw => Algorithm::Cw,
            AlgoArg::Rayleigh => Algorithm::Rayleigh,
            AlgoArg::Power => Algorithm::Power,
            AlgoArg::FixedShift => Algorithm::FixedShift(
                shift.ok_or_else(|| CliError::usage("--algo fixed-shift needs --shift"))?,
            ),
        };
        if shift.is_some() && !matches!(algorithm, Algorithm::FixedShift(_)) {
            return Err(CliError::usage(
                "--shift applies to --algo fixed-shift only",
            ));
        }
        let v0 = args.v0.clone().or(file.v0).unwrap_or(StartVector::Ones);
        if v0 == StartVector::TOne && !is_grid {
            return Err(CliError::usage("--v0 t-one applies to grid problems only"));
        }
        Ok(Self {
            problem,
            algorithm,
            config,
            v0,
            seed: args.seed.or(file.seed).unwrap_or(DEFAULT_TRIDIAGONAL_SEED),
            output: args.output.or(file.output).unwrap_or(OutputArg::Text),
            quick_tolerance,
        })
    }
}

fn read_vector(path: &Path, dim: usize) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| {
        CliError::input(Error::Io {
            path: path.to_path_buf(),
            source,
        })
    })?;
    let v = text
        .split_whitespace()
        .map(|t| t.parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| CliError {
            code: EXIT_INPUT,
            message: format!("{}: {e}", path.display()),
        })?;
    if v.len() != dim {
        return Err(CliError {
            code: EXIT_INPUT,
            message: format!(
                "{}: expected {dim} entries, found {}",
                path.display(),
                v.len()
            ),
        });
    }
    Ok(v)
}

fn start_vector(v0: &StartVector, op: &dyn PositiveOperator) -> Result<Vec<f64>, CliError> {
    match v0 {
        StartVector::Ones => Ok(vec![1.0; op.dim()]),
        StartVector::TOne => Ok(op.apply(&vec![1.0; op.dim()])?),
        StartVector::File(p) => read_vector(p, op.dim()),
    }
}

/// Runs one experiment and returns its report with errors attached when a
/// reference is requested.
pub fn run_experiment(
    spec: &ExperimentSpec,
    with_reference: bool,
) -> Result<ConvergenceReport, CliError> {
    let op = spec.problem.build(spec.seed)?;
    let v0 = start_vector(&spec.v0, op.as_ref())?;
    let mut config = spec.config;
    if spec.quick_tolerance {
        let h = match &spec.problem {
            Problem::UnitSquare(h) | Problem::LShape(h) => *h,
            Problem::MaskFile(p) => load_mask(p).map_err(CliError::input)?.h(),
            _ => unreachable!("quick tolerance is validated for grids"),
        };
        config.stopping.epsilon = h * h / 10.0;
    }
    let op = op.as_ref();
    let mut report = match spec.algorithm {
        Algorithm::Cw => variable_lambda_power(op, &v0, &config)?,
        Algorithm::Rayleigh => rayleigh_quotient_iteration(op, &v0, &config.stopping)?,
        Algorithm::Power => plain_power(op, &v0, &config.stopping)?,
        Algorithm::FixedShift(shift) => fixed_shift_power(op, &v0, shift, &config.stopping)?,
    };
    if with_reference {
        let (lambda_ref, _) = reference_eigenpair(op)?;
        report.attach_reference(lambda_ref);
    }
    Ok(report)
}

fn render_solve(spec: &ExperimentSpec, report: &ConvergenceReport) -> String {
    let order = report.order_estimate();
    match spec.output {
        OutputArg::Csv => emit_report(report, &order, ReportFormat::Csv),
        OutputArg::Md => emit_report(report, &order, ReportFormat::Markdown),
        OutputArg::Json => emit_report(report, &order, ReportFormat::Json),
        OutputArg::Text => {
            let stop = serde_json::to_value(report.stop_reason)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned))
                .unwrap_or_default();
            let mut out = format!(
                "problem: {}\nalgorithm: {}\ncriterion: {} < {:e}\nstop: {} after {} iterations\nlambda: {:.17e}\n",
                spec.problem,
                report.algorithm.tag(),
                report.criterion.name(),
                report.epsilon,
                stop,
                report.iterations,
                report.lambda,
            );
            if let Some(t) = report.wall_time {
                out.push_str(&format!("wall time: {t:.3} s\n"));
            }
            out.push('\n');
            out.push_str(&emit_report(report, &order, ReportFormat::Markdown));
            out
        }
    }
}

fn write_output(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    let res = match out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|source| Error::Io {
                path: PathBuf::from("<stdout>"),
                source,
            }),
    };
    res.map_err(CliError::input)
}

fn solve(args: &SolveArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let spec = ExperimentSpec::resolve(args)?;
    let mut report = run_experiment(&spec, !args.no_reference)?;
    if !args.timing {
        report = report.without_timing();
    }
    write_output(&render_solve(&spec, &report), args.out.as_deref(), stdout)?;
    Ok(if report.converged() {
        EXIT_OK
    } else {
        EXIT_NOT_CONVERGED
    })
}

fn bounds(args: &BoundsArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let op = args
        .problem
        .build(args.seed.unwrap_or(DEFAULT_TRIDIAGONAL_SEED))?;
    if args.v0 == StartVector::TOne && op.kind().is_matrix() {
        return Err(CliError::usage("--v0 t-one applies to grid problems only"));
    }
    let v = start_vector(&args.v0, op.as_ref())?;
    let b = collatz_wielandt(op.as_ref(), &v)?;
    let text = match args.output {
        OutputArg::Text => format!("{:.6} {:.6}\n", b.lower, b.upper),
        OutputArg::Csv => format!(
            "lower,upper,argmin,argmax\n{:e},{:e},{},{}\n",
            b.lower, b.upper, b.argmin, b.argmax
        ),
        OutputArg::Md => format!(
            "| lower | upper | argmin | argmax |\n|---:|---:|---:|---:|\n| {:.6} | {:.6} | {} | {} |\n",
            b.lower, b.upper, b.argmin, b.argmax
        ),
        OutputArg::Json => {
            let mut s = serde_json::to_string_pretty(&b).expect("bounds serialize");
            s.push('\n');
            s
        }
    };
    write_output(&text, args.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

fn bench(args: &BenchArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let table = bench_table(args.table, args.seed.unwrap_or(DEFAULT_TRIDIAGONAL_SEED))?;
    let text = match args.output {
        OutputArg::Text | OutputArg::Md => table.to_markdown(),
        OutputArg::Csv => table.to_csv(),
        OutputArg::Json => table.to_json(),
    };
    write_output(&text, args.out.as_deref(), stdout)?;
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the command.
/// Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
            } else {
                let _ = stdout.write_all(text.as_bytes());
            }
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => solve(a, stdout),
        Command::Bounds(a) => bounds(a, stdout),
        Command::Bench(a) => bench(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.code
        }
    }
}
