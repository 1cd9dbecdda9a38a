//! Pipeline front-end for the boxjenkins library. Every subcommand is a
//! pure function of its inputs: rerunning with the same files and flags
//! produces byte-identical output, and no input file is ever written.

mod args;
mod render;

use std::fs;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, DiffArgs, Format, SpecArgs};
use boxjenkins::correlogram::Correlogram;
use boxjenkins::diagnostics::diagnose;
use boxjenkins::forecast::{accuracy, forecast};
use boxjenkins::sarima::{estimate, FittedModel, SarimaSpec};
use boxjenkins::select::rank;
use boxjenkins::series::{emit_csv, ingest_csv, seasonal_pivot, TimeSeries};
use boxjenkins::simulate::{simulate, SimulationConfig};
use boxjenkins::transform::DifferenceSpec;
use boxjenkins::unitroot::{adf_test, decide_differencing};

/// User mistakes (bad flags, unreadable or malformed files) exit 1;
/// computational failures (non-convergence, degeneracy) exit 2.
enum Failure {
    User(String),
    Computational(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::User(_) => 1,
            Failure::Computational(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::User(m) | Failure::Computational(m) => m,
        }
    }
}

impl From<boxjenkins::Error> for Failure {
    fn from(e: boxjenkins::Error) -> Self {
        if e.is_user_error() {
            Failure::User(e.to_string())
        } else {
            Failure::Computational(e.to_string())
        }
    }
}

type CliResult = Result<String, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version print to stdout and exit cleanly; genuine
            // argument errors follow the user-error exit code.
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (out, result) = match cli.command {
        Command::Ingest(a) => (a.out.clone(), run_ingest(a)),
        Command::Pivot(a) => (a.out.clone(), run_pivot(a)),
        Command::Acf(a) => (a.out.clone(), run_acf(a)),
        Command::Adf(a) => (a.out.clone(), run_adf(a)),
        Command::Fit(a) => (a.out.clone(), run_fit(a)),
        Command::Select(a) => (a.out.clone(), run_select(a)),
        Command::Diagnose(a) => (a.out.clone(), run_diagnose(a)),
        Command::Forecast(a) => (a.out.clone(), run_forecast(a)),
        Command::Evaluate(a) => (a.out.clone(), run_evaluate(a)),
        Command::Simulate(a) => (a.out.clone(), run_simulate(a)),
        Command::Pipeline(a) => (a.out.clone(), run_pipeline(a)),
    };
    match result.and_then(|report| deliver(&report, out.as_deref())) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn deliver(report: &str, out: Option<&Path>) -> Result<(), Failure> {
    let mut text = report.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::User(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn read_series(path: &Path) -> Result<TimeSeries, Failure> {
    Ok(ingest_csv(&read_file(path)?)?)
}

fn read_model(path: &Path) -> Result<FittedModel, Failure> {
    Ok(FittedModel::from_json(&read_file(path)?)?)
}

fn diff_spec(a: &DiffArgs) -> Result<DifferenceSpec, Failure> {
    Ok(DifferenceSpec::new(a.d, a.seasonal_d, a.s)?)
}

fn model_spec(diff: DifferenceSpec, s: &SpecArgs) -> Result<SarimaSpec, Failure> {
    Ok(SarimaSpec::new(&s.ar, &s.sar, &s.ma, &s.sma, diff, s.constant)?)
}

fn pretty_json<T: serde::Serialize>(value: &T) -> CliResult {
    serde_json::to_string_pretty(value)
        .map_err(|e| Failure::Computational(format!("serializing report: {e}")))
}

fn csv_unsupported(command: &str) -> Failure {
    Failure::User(format!(
        "{command} has no csv rendering; use --format text or --format json"
    ))
}

fn run_ingest(a: args::IngestArgs) -> CliResult {
    let ts = read_series(&a.input)?;
    match a.format {
        Format::Text => Ok(render::series_summary_text(&ts)),
        Format::Csv => Ok(emit_csv(&ts)),
        Format::Json => pretty_json(&render::series_summary_json(&ts)),
    }
}

fn run_pivot(a: args::PivotArgs) -> CliResult {
    let pivot = seasonal_pivot(&read_series(&a.input)?)?;
    match a.format {
        Format::Text => Ok(render::pivot_text(&pivot)),
        Format::Csv => Ok(render::pivot_csv(&pivot)),
        Format::Json => pretty_json(&pivot),
    }
}

fn run_acf(a: args::AcfArgs) -> CliResult {
    let ts = read_series(&a.input)?;
    let z = ts.difference(diff_spec(&a.diff)?)?;
    let c = Correlogram::compute(z.values(), a.max_lag, 0)?;
    match a.format {
        Format::Text => Ok(render::correlogram_text(&c)),
        Format::Csv => Ok(render::correlogram_csv(&c)),
        Format::Json => pretty_json(&c),
    }
}

fn run_adf(a: args::AdfArgs) -> CliResult {
    let ts = read_series(&a.input)?;
    let z = ts.difference(diff_spec(&a.diff)?)?;
    let result = adf_test(z.values(), a.max_lag)?;
    match a.format {
        Format::Text => Ok(render::adf_text(&result)),
        Format::Csv => Ok(render::adf_csv(&result)),
        Format::Json => pretty_json(&result),
    }
}

fn run_fit(a: args::FitArgs) -> CliResult {
    let ts = read_series(&a.input)?;
    let spec = model_spec(diff_spec(&a.diff)?, &a.spec)?;
    let model = estimate(&spec, &ts)?;
    match a.format {
        Format::Text => Ok(render::fit_text(&model)),
        Format::Csv => Ok(render::fit_csv(&model)),
        Format::Json => Ok(model.to_json()),
    }
}

fn read_candidates(path: &Path) -> Result<Vec<SarimaSpec>, Failure> {
    serde_json::from_str(&read_file(path)?)
        .map_err(|e| Failure::User(format!("{}: {e}", path.display())))
}

fn run_select(a: args::SelectArgs) -> CliResult {
    let ts = read_series(&a.input)?;
    let board = rank(&read_candidates(&a.candidates)?, &ts)?;
    match a.format {
        Format::Text => Ok(render::leaderboard_text(&board)),
        Format::Csv => Ok(render::leaderboard_csv(&board)),
        Format::Json => pretty_json(&board),
    }
}

fn run_diagnose(a: args::DiagnoseArgs) -> CliResult {
    let model = read_model(&a.model)?;
    let report = diagnose(&model, a.max_lag, a.lm_lags)?;
    match a.format {
        Format::Text => Ok(render::diagnostics_text(&report)),
        Format::Csv => Err(csv_unsupported("diagnose")),
        Format::Json => pretty_json(&report),
    }
}

fn run_forecast(a: args::ForecastArgs) -> CliResult {
    let model = read_model(&a.model)?;
    let fc = forecast(&model, a.horizon)?;
    match a.format {
        Format::Text => Ok(render::forecast_text(&fc)),
        Format::Csv => Ok(render::forecast_csv(&fc)),
        Format::Json => pretty_json(&fc),
    }
}

fn run_evaluate(a: args::EvaluateArgs) -> CliResult {
    let actual = read_series(&a.actual)?;
    let predicted = read_series(&a.predicted)?;
    if actual.start() != predicted.start() {
        return Err(Failure::User(format!(
            "period mismatch: actuals start {}, predictions start {}",
            actual.start(),
            predicted.start()
        )));
    }
    let report = accuracy(actual.values(), predicted.values())?;
    match a.format {
        Format::Text => Ok(render::accuracy_text(&report)),
        Format::Csv => Ok(render::accuracy_csv(&report)),
        Format::Json => pretty_json(&report),
    }
}

fn run_simulate(a: args::SimulateArgs) -> CliResult {
    let mut cfg: SimulationConfig = serde_json::from_str(&read_file(&a.config)?)
        .map_err(|e| Failure::User(format!("{}: {e}", a.config.display())))?;
    if let Some(seed) = a.seed {
        cfg = cfg.with_seed(seed);
    }
    let (ts, shocks) = simulate(&cfg)?;
    match a.format {
        Format::Text => Ok(format!(
            "simulated {} observations starting {} (seed {})\nmodel: {}; d={}, D={}, s={}; sigma={}\n",
            ts.values().len(),
            ts.start(),
            cfg.seed(),
            cfg.spec(),
            cfg.spec().diff().d(),
            cfg.spec().diff().seasonal_d(),
            cfg.spec().diff().period(),
            cfg.sigma(),
        )),
        Format::Csv => Ok(emit_csv(&ts)),
        Format::Json => pretty_json(&serde_json::json!({
            "config": cfg,
            "start": ts.start().to_string(),
            "frequency": ts.frequency(),
            "values": ts.values(),
            "shocks": shocks,
        })),
    }
}

fn run_pipeline(a: args::PipelineArgs) -> CliResult {
    let ts = read_series(&a.input)?;
    let decision = decide_differencing(&ts)?;
    let board = rank(&read_candidates(&a.candidates)?, &ts)?;
    let winner = board
        .best_model()
        .ok_or_else(|| Failure::Computational("no candidate produced a fit".into()))?;
    let diag = diagnose(winner, a.max_lag, a.lm_lags)?;
    let fc = forecast(winner, a.horizon)?;
    match a.format {
        Format::Text => Ok(format!(
            "== unit-root analysis ==\n{}\n== candidate leaderboard ==\n{}\n== diagnostics: {} ==\n{}\n== forecast ==\n{}",
            render::unit_root_text(&decision),
            render::leaderboard_text(&board),
            winner.spec(),
            render::diagnostics_text(&diag),
            render::forecast_text(&fc),
        )),
        Format::Csv => Err(csv_unsupported("pipeline")),
        Format::Json => pretty_json(&serde_json::json!({
            "unit_root": decision,
            "leaderboard": board,
            "diagnostics": diag,
            "forecast": fc,
        })),
    }
}
