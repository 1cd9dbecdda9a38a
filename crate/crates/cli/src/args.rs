//! Command-line surface: subcommands, flags, defaults. All flags are
//! long-form; `--d` and `--D` follow the lowercase-regular, uppercase-
//! seasonal convention used throughout the library.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "boxjenkins",
    version,
    about = "Box-Jenkins SARIMA workflow for monthly series: identify, estimate, check, forecast"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Validate a series CSV and summarize it
    Ingest(IngestArgs),
    /// Year-by-month table with per-month means and peak/trough months
    Pivot(PivotArgs),
    /// Correlogram: autocorrelations, partials, Ljung-Box Q per lag
    Acf(AcfArgs),
    /// Augmented Dickey-Fuller unit-root test
    Adf(AdfArgs),
    /// Estimate a SARIMA model and emit it as a reusable JSON file
    Fit(FitArgs),
    /// Estimate candidate specifications and rank them by BIC then AIC
    Select(SelectArgs),
    /// Residual correlogram and serial-correlation LM test for a fitted model
    Diagnose(DiagnoseArgs),
    /// Point forecasts from a fitted model
    Forecast(ForecastArgs),
    /// Accuracy of predictions against actuals: RMSE, MAD, MAPE, Theil's U
    Evaluate(EvaluateArgs),
    /// Generate a synthetic SARIMA series from a JSON config
    Simulate(SimulateArgs),
    /// Full workflow: unit-root analysis, selection, diagnostics, forecast
    Pipeline(PipelineArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
}

/// Differencing applied before analysis, mirroring the library's
/// `DifferenceSpec`.
#[derive(Args)]
pub struct DiffArgs {
    /// Regular differencing order
    #[arg(long, default_value_t = 0)]
    pub d: usize,
    /// Seasonal differencing order
    #[arg(long = "D", default_value_t = 0)]
    pub seasonal_d: usize,
    /// Seasonal period
    #[arg(long, default_value_t = 12)]
    pub s: usize,
}

/// Subset lags of the model, one coefficient per named lag.
#[derive(Args)]
pub struct SpecArgs {
    /// Autoregressive lags (repeat the flag or separate with commas)
    #[arg(long, value_delimiter = ',')]
    pub ar: Vec<usize>,
    /// Seasonal autoregressive lags (multiples of the period)
    #[arg(long, value_delimiter = ',')]
    pub sar: Vec<usize>,
    /// Moving-average lags
    #[arg(long, value_delimiter = ',')]
    pub ma: Vec<usize>,
    /// Seasonal moving-average lags (multiples of the period)
    #[arg(long, value_delimiter = ',')]
    pub sma: Vec<usize>,
    /// Include a constant term
    #[arg(long)]
    pub constant: bool,
}

#[derive(Args)]
pub struct IngestArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    /// text summary, csv normalized re-emission, or json summary
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PivotArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AcfArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub diff: DiffArgs,
    /// Number of lags in the correlogram
    #[arg(long, default_value_t = 24)]
    pub max_lag: usize,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct AdfArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub diff: DiffArgs,
    /// Cap on augmentation lags; omitted means the data-driven default
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct FitArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub diff: DiffArgs,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// json is the reusable model file; text and csv summarize it
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SelectArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    /// JSON array of candidate specifications
    #[arg(long)]
    pub candidates: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct DiagnoseArgs {
    /// Fitted-model JSON produced by `fit`
    #[arg(long)]
    pub model: PathBuf,
    /// Number of lags in the residual correlogram
    #[arg(long, default_value_t = 24)]
    pub max_lag: usize,
    /// Number of lagged residuals in the LM regression
    #[arg(long, default_value_t = 3)]
    pub lm_lags: usize,
    /// text or json; csv has no natural shape for this report
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ForecastArgs {
    /// Fitted-model JSON produced by `fit`
    #[arg(long)]
    pub model: PathBuf,
    /// Number of periods past the estimation sample
    #[arg(long, default_value_t = 12)]
    pub horizon: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// CSV of observed values
    #[arg(long)]
    pub actual: PathBuf,
    /// CSV of predictions for the same periods
    #[arg(long)]
    pub predicted: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Simulation config JSON: spec, coefficients by term, sigma, length, seed
    #[arg(long)]
    pub config: PathBuf,
    /// Override the seed in the config
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the series here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct PipelineArgs {
    /// Series CSV with a period,value header
    #[arg(long)]
    pub input: PathBuf,
    /// JSON array of candidate specifications
    #[arg(long)]
    pub candidates: PathBuf,
    /// Forecast horizon for the winning model
    #[arg(long, default_value_t = 12)]
    pub horizon: usize,
    /// Number of lags in the residual correlogram
    #[arg(long, default_value_t = 24)]
    pub max_lag: usize,
    /// Number of lagged residuals in the LM regression
    #[arg(long, default_value_t = 3)]
    pub lm_lags: usize,
    /// text or json; csv has no natural shape for this report
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Write the report here instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}
