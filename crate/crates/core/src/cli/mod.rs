//! The `regarch` command-line tool.
//!
//! ```text
//! regarch simulate --config sim.toml --out-dir data/
//! regarch measures --bars data/bars.csv --measures all --out data/measures.csv
//! regarch fit --returns data/returns.csv --measures data/measures.csv --kinds rrv --model regarch --out fit.json
//! regarch forecast --returns data/returns.csv --measures data/measures.csv --kinds rrv --model regarch --out fc.csv
//! regarch evaluate --forecast regarch=fc.csv --proxy data/true_variance.csv --returns data/returns.csv --out eval.json
//! regarch describe --input data/returns.csv --out describe.json
//! ```
//!
//! Failures write `{"status": "error", ...}` to the command's JSON output
//! (or `<out>.error.json` for CSV outputs) and exit with code 1. Usage
//! errors exit with code 2. Log verbosity follows `RUST_LOG`.

mod commands;
pub mod io;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::diagnostics::LjungBoxAdjust;
use crate::estimation::ModelKind;
use crate::forecast::ForecastScheme;
use crate::series::{DemeanMode, MeasureKind};

#[derive(Debug, Parser)]
#[command(
    name = "regarch",
    version,
    about = "Realized EGARCH volatility modelling"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Daily realized measures from intraday OHLC bars.
    Measures(MeasuresArgs),
    /// Fit a volatility model by quasi-maximum likelihood.
    Fit(FitArgs),
    /// One-step-ahead variance forecasts over the out-of-sample period.
    Forecast(ForecastArgs),
    /// Score forecast files by MSE, QLIKE and predictive log-likelihood.
    Evaluate(EvaluateArgs),
    /// Descriptive statistics of a dated series.
    Describe(DescribeArgs),
    /// Simulate data from a TOML configuration.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureChoice {
    Rv,
    Rrv,
    Rk,
    All,
}

#[derive(Debug, Args)]
pub struct MeasuresArgs {
    /// Bars CSV: date,timestamp,open,high,low,close.
    #[arg(long)]
    pub bars: PathBuf,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "all")]
    pub measures: Vec<MeasureChoice>,
    /// λ₂,ₘ dividing the squared range.
    #[arg(long, default_value_t = crate::measures::DEFAULT_LAMBDA2M)]
    pub lambda2m: f64,
    /// Price observations per bar behind the range (omit for continuous).
    #[arg(long)]
    pub m: Option<u32>,
    /// Expected bar spacing in seconds.
    #[arg(long)]
    pub interval: Option<u32>,
    /// Merge every N bars before computing measures.
    #[arg(long, default_value_t = 1)]
    pub aggregate: usize,
    /// Also emit `proxy` rows: RK scaled by ĉ estimated against these returns.
    #[arg(long)]
    pub proxy_from: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelChoice {
    Garch,
    Gjr,
    Egarch,
    Regarch,
}

impl From<ModelChoice> for ModelKind {
    fn from(m: ModelChoice) -> Self {
        match m {
            ModelChoice::Garch => ModelKind::Garch,
            ModelChoice::Gjr => ModelKind::Gjr,
            ModelChoice::Egarch => ModelKind::Egarch,
            ModelChoice::Regarch => ModelKind::Regarch,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DemeanChoice {
    None,
    Sample,
}

impl From<DemeanChoice> for DemeanMode {
    fn from(d: DemeanChoice) -> Self {
        match d {
            DemeanChoice::None => DemeanMode::None,
            DemeanChoice::Sample => DemeanMode::SampleMean,
        }
    }
}

/// Inputs and estimation settings shared by `fit` and `forecast`.
#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Returns CSV: date,return.
    #[arg(long)]
    pub returns: PathBuf,
    /// Measures CSV files (date,kind,value); repeatable.
    #[arg(long = "measures")]
    pub measures: Vec<PathBuf>,
    /// Measure kinds to use, in order (default: every non-proxy kind found).
    #[arg(long, value_delimiter = ',', value_parser = parse_kind)]
    pub kinds: Vec<MeasureKind>,
    #[arg(long, value_enum)]
    pub model: ModelChoice,
    /// Estimate φ instead of fixing it at 1 (REGARCH).
    #[arg(long)]
    pub free_phi: bool,
    /// Do not impose α + β < 1 (GARCH) or |β − Σγφ| < 1 (REGARCH).
    #[arg(long)]
    pub no_stationarity: bool,
    #[arg(long, value_enum, default_value = "none")]
    pub demean: DemeanChoice,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Standard multistart set size.
    #[arg(long, default_value_t = 5)]
    pub starts: usize,
}

fn parse_kind(s: &str) -> std::result::Result<MeasureKind, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Result document (JSON).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeChoice {
    Recursive,
    Rolling,
}

impl From<SchemeChoice> for ForecastScheme {
    fn from(s: SchemeChoice) -> Self {
        match s {
            SchemeChoice::Recursive => ForecastScheme::Recursive,
            SchemeChoice::Rolling => ForecastScheme::Rolling,
        }
    }
}

#[derive(Debug, Args)]
pub struct ForecastArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value = "recursive")]
    pub scheme: SchemeChoice,
    /// Estimation window (default ⌊3T/4⌋).
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub refit_stride: usize,
    /// Forecast CSV (date,h_hat); refit summaries go to `<stem>.refits.json`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    /// Forecast CSV, optionally labelled as `name=path`; repeatable.
    #[arg(long = "forecast", required = true)]
    pub forecasts: Vec<String>,
    /// Proxy CSV in measures format (kind `proxy`, or a single kind).
    #[arg(long)]
    pub proxy: PathBuf,
    #[arg(long)]
    pub returns: PathBuf,
    /// Result document (JSON); plot data goes to `<stem>.plot.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AdjustChoice {
    None,
    Het,
}

impl From<AdjustChoice> for LjungBoxAdjust {
    fn from(a: AdjustChoice) -> Self {
        match a {
            AdjustChoice::None => LjungBoxAdjust::None,
            AdjustChoice::Het => LjungBoxAdjust::Heteroskedasticity,
        }
    }
}

#[derive(Debug, Args)]
pub struct DescribeArgs {
    /// `date,<value>` or measures CSV.
    #[arg(long)]
    pub input: PathBuf,
    /// Measure kind to describe when the input holds several.
    #[arg(long, value_parser = parse_kind)]
    pub kind: Option<MeasureKind>,
    /// Describe the natural log of the values.
    #[arg(long)]
    pub log: bool,
    #[arg(long, default_value_t = 10)]
    pub lags: usize,
    #[arg(long, value_enum, default_value = "het")]
    pub lb_adjust: AdjustChoice,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML simulation config.
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Overrides the seed in the config.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    commands::execute(&cli.command)
}
