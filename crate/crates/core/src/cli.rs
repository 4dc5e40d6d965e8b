//! `opuc insert|oracle|tailfit|verify --config <path> [--out <path>] [--seed <u64>]`
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid config or input,
//! 3 cross-check disagreement, 4 ill-conditioned tail fit.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::asymptotics::{fit_tail_constants, TailFitReport};
use crate::error::OpucError;
use crate::measure::{
    default_quad_points, moments, moments_auto, moments_to_verblunsky, MeasureSpec, PointMass,
};
use crate::pointmass::{InsertionChain, InsertionMethod};
use crate::sequence::{VerblunskySequence, C64};
use crate::validation::{max_pairwise, verify, VerifyOptions};

/// Largest `n_max` for which `insert` cross-checks the O(N^2) methods.
pub const METHOD_CHECK_LIMIT: usize = 2048;
/// Largest `n_max` for which `insert` also runs the Toeplitz oracle.
pub const ORACLE_CHECK_LIMIT: usize = 128;
pub const METHOD_TOLERANCE: f64 = 1e-9;
pub const ORACLE_TOLERANCE: f64 = 1e-8;

pub const CSV_HEADER: [&str; 6] = [
    "n",
    "re_alpha_base",
    "im_alpha_base",
    "re_alpha_pert",
    "im_alpha_pert",
    "abs_tail",
];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassConfig {
    #[serde(alias = "angle_radians")]
    pub angle: f64,
    pub weight: f64,
}

/// Experiment file, in TOML.
///
/// ```toml
/// base = [[0.4, 0.0]]
/// masses = [{ angle = 1.0471975512, weight = 0.3 }]
/// n_max = 20
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub base: Vec<(f64, f64)>,
    #[serde(default)]
    pub masses: Vec<MassConfig>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    pub quad_points: Option<usize>,
    #[serde(default = "default_window")]
    pub window: (usize, usize),
    pub output_path: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    /// `(index, re, im)` replacements applied to the computed moments.
    #[serde(default)]
    pub moment_overrides: Vec<(usize, f64, f64)>,
}

fn default_n_max() -> usize {
    100
}

fn default_window() -> (usize, usize) {
    (1000, 4000)
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: Self = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if config.n_max == 0 {
            return Err(CliError::Config("n_max must be at least 1".into()));
        }
        config.spec()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn spec(&self) -> Result<MeasureSpec, CliError> {
        let base = VerblunskySequence::new(self.base.iter().map(|&(re, im)| C64::new(re, im)))?;
        let masses = self
            .masses
            .iter()
            .map(|m| PointMass::at_angle(m.angle, m.weight))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(MeasureSpec::new(base, masses)?)
    }

    pub fn overrides(&self) -> Vec<(usize, C64)> {
        self.moment_overrides
            .iter()
            .map(|&(i, re, im)| (i, C64::new(re, im)))
            .collect()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Numeric(#[from] OpucError),
    #[error("{0}")]
    Disagreement(String),
    #[error("{0}")]
    VerifyFailed(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::VerifyFailed(_) => 1,
            Self::Config(_) | Self::Io(_) => 2,
            Self::Numeric(OpucError::IllConditioned { .. }) => 4,
            Self::Numeric(_) => 2,
            Self::Disagreement(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "opuc",
    version,
    about = "Point-mass perturbations of orthogonal polynomials on the unit circle"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verblunsky coefficients after inserting the configured masses
    Insert(CommonArgs),
    /// Verblunsky coefficients from the moment Toeplitz matrices
    Oracle(CommonArgs),
    /// Fit the 1/n tail constants and compare them with the Szegő predictions
    Tailfit(CommonArgs),
    /// Run the seeded invariant suite
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Where an artifact goes and where its summary goes.
#[derive(Debug, Clone, PartialEq)]
pub enum Output {
    Stdout,
    File(PathBuf),
}

impl Output {
    fn resolve(args: &CommonArgs, config: &ExperimentConfig) -> Self {
        match args.out.clone().or_else(|| config.output_path.clone()) {
            Some(p) => Self::File(p),
            None => Self::Stdout,
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn float(x: f64) -> String {
    format!("{x:.16e}")
}

/// The coefficient table shared by `insert` and `oracle`.
pub fn coefficient_csv(
    base: &VerblunskySequence,
    perturbed: &VerblunskySequence,
    n_max: usize,
) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER).map_err(csv_error)?;
    for n in 0..n_max {
        let (b, p) = (base.get(n), perturbed.get(n));
        w.write_record([
            n.to_string(),
            float(b.re),
            float(b.im),
            float(p.re),
            float(p.im),
            float((p - b).norm()),
        ])
        .map_err(csv_error)?;
    }
    w.into_inner().map_err(|e| CliError::Io(e.into_error()))
}

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(std::io::Error::other(e))
}

fn pretty(value: &impl Serialize) -> Vec<u8> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
    bytes.push(b'\n');
    bytes
}

fn emit(output: &Output, artifact: &[u8], summary: Option<&[u8]>) -> Result<(), CliError> {
    match output {
        Output::File(path) => {
            write_atomic(path, artifact)?;
            if let Some(s) = summary {
                write_atomic(&path.with_extension("json"), s)?;
            }
        }
        Output::Stdout => {
            std::io::stdout().write_all(artifact)?;
            if let Some(s) = summary {
                std::io::stderr().write_all(s)?;
            }
        }
    }
    Ok(())
}

fn masses_json(spec: &MeasureSpec) -> serde_json::Value {
    spec.masses()
        .iter()
        .map(|m| json!({ "angle": m.location().angle(), "weight": m.weight() }))
        .collect()
}

pub fn cmd_insert(config: &ExperimentConfig, output: &Output) -> Result<(), CliError> {
    let spec = config.spec()?;
    let n = config.n_max;
    let chain = InsertionChain::new(&spec);
    let perturbed = chain.run(InsertionMethod::Direct, n)?;
    let mut method_residuals = serde_json::Map::new();
    let mut failures = Vec::new();
    if n <= METHOD_CHECK_LIMIT {
        for method in [InsertionMethod::Simon, InsertionMethod::Geronimus] {
            let other = chain.run(method, n)?;
            let r = max_pairwise(&[perturbed.clone(), other]);
            method_residuals.insert(
                json!(method).as_str().unwrap_or_default().to_string(),
                json!(r),
            );
            if !(r < METHOD_TOLERANCE) {
                failures.push(format!("{method:?} differs by {r:e}"));
            }
        }
    }
    let oracle_residual = if n <= ORACLE_CHECK_LIMIT {
        let mv = moments_auto(&spec, n)?;
        let oracle = moments_to_verblunsky(&mv, n)?;
        let r = max_pairwise(&[perturbed.clone(), oracle]);
        if !(r < ORACLE_TOLERANCE) {
            failures.push(format!("Toeplitz oracle differs by {r:e}"));
        }
        Some(r)
    } else {
        None
    };
    let summary = json!({
        "command": "insert",
        "n_max": n,
        "base_len": spec.base().len(),
        "masses": masses_json(&spec),
        "method_residuals": method_residuals,
        "oracle_residual": oracle_residual,
        "method_tolerance": METHOD_TOLERANCE,
        "oracle_tolerance": ORACLE_TOLERANCE,
    });
    emit(
        output,
        &coefficient_csv(spec.base(), &perturbed, n)?,
        Some(&pretty(&summary)),
    )?;
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Disagreement(failures.join("; ")))
    }
}

pub fn cmd_oracle(config: &ExperimentConfig, output: &Output) -> Result<(), CliError> {
    let spec = config.spec()?;
    let n = config.n_max;
    let points = config
        .quad_points
        .unwrap_or_else(|| default_quad_points(n, spec.base().len()));
    let mut mv = moments(&spec, n, points)?;
    for (index, value) in config.overrides() {
        if index < mv.c.len() {
            mv.c[index] = value;
        }
    }
    let oracle = moments_to_verblunsky(&mv, n)?;
    let summary = json!({
        "command": "oracle",
        "n_max": n,
        "quad_points": points,
        "quadrature_defect": mv.defect,
        "masses": masses_json(&spec),
    });
    emit(
        output,
        &coefficient_csv(spec.base(), &oracle, n)?,
        Some(&pretty(&summary)),
    )
}

/// `tailfit` output, with complex numbers as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailFitSummary {
    pub fitted_c: Vec<(f64, f64)>,
    pub predicted_conj_over_d: Vec<(f64, f64)>,
    pub predicted_d_over_conj: Vec<(f64, f64)>,
    pub winner: crate::asymptotics::ConventionVerdict,
    pub residual_rms: f64,
    pub condition: f64,
    pub window: (usize, usize),
    pub error_decay_blocks: Vec<crate::asymptotics::DyadicBlock>,
}

impl From<&TailFitReport> for TailFitSummary {
    fn from(r: &TailFitReport) -> Self {
        let pairs = |v: &[C64]| v.iter().map(|c| (c.re, c.im)).collect();
        Self {
            fitted_c: pairs(&r.fitted_c),
            predicted_conj_over_d: pairs(&r.predicted_conj_over_d),
            predicted_d_over_conj: pairs(&r.predicted_d_over_conj),
            winner: r.winner,
            residual_rms: r.residual_rms,
            condition: r.condition,
            window: r.window,
            error_decay_blocks: r.error_decay.clone(),
        }
    }
}

pub fn cmd_tailfit(config: &ExperimentConfig, output: &Output) -> Result<(), CliError> {
    let spec = config.spec()?;
    let (lo, hi) = config.window;
    if config.n_max <= hi {
        return Err(CliError::Config(format!(
            "n_max = {} must exceed the window end {hi}",
            config.n_max
        )));
    }
    let perturbed = InsertionChain::new(&spec).run(InsertionMethod::Direct, config.n_max)?;
    let report = fit_tail_constants(spec.base(), &perturbed, spec.masses(), (lo, hi))?;
    emit(output, &pretty(&TailFitSummary::from(&report)), None)
}

pub fn cmd_verify(config: &ExperimentConfig, seed: u64, output: &Output) -> Result<(), CliError> {
    let options = VerifyOptions {
        spec: config.spec()?,
        moment_overrides: config.overrides(),
        ..VerifyOptions::default()
    };
    let report = verify(seed, &options);
    emit(output, &pretty(&report), None)?;
    if report.passed {
        Ok(())
    } else {
        let names: Vec<_> = report.failures().map(|c| c.name.as_str()).collect();
        Err(CliError::VerifyFailed(format!(
            "failed: {}",
            names.join(", ")
        )))
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("OPUC_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
    {
        // a second initialization (e.g. in tests) keeps the existing pool
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
}

pub fn dispatch(cli: Cli) -> Result<(), CliError> {
    configure_threads();
    let (Command::Insert(args)
    | Command::Oracle(args)
    | Command::Tailfit(args)
    | Command::Verify(args)) = &cli.command;
    let config = ExperimentConfig::load(&args.config)?;
    let output = Output::resolve(args, &config);
    match &cli.command {
        Command::Insert(_) => cmd_insert(&config, &output),
        Command::Oracle(_) => cmd_oracle(&config, &output),
        Command::Tailfit(_) => cmd_tailfit(&config, &output),
        Command::Verify(args) => cmd_verify(&config, args.seed.unwrap_or(config.seed), &output),
    }
}

pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("opuc: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
