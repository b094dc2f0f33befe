//! Command-line frontend: generate, forecast, evaluate, anomalies,
//! explain, bench, complexity.
//!
//! Reports go to the output path (or stdout); diagnostics go to stderr
//! only. Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! failure.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use spinex_core::baselines::{self, Forecaster};
use spinex_core::bench::{
    self, fit_complexity, generate_synthetic, SpinexForecaster, SyntheticFunction, SyntheticSpec,
};
use spinex_core::diagnostics;
use spinex_core::engine::{EngineConfig, EngineState};
use spinex_core::forecaster;
use spinex_core::metrics;
use spinex_core::report::{self, Report, ReportKind};
use spinex_core::series::{load_csv, save_csv, ColumnSelector, TimeSeries};
use spinex_core::similarity::SimilarityMethod;

#[derive(Parser)]
#[command(name = "spinex", version, about = "Similarity-based time-series forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic series and write it as CSV.
    Generate(GenerateArgs),
    /// Forecast a series from a CSV file.
    Forecast(ForecastArgs),
    /// Cross-validate the engine on a series and report averaged metrics.
    Evaluate(EvaluateArgs),
    /// Detect anomalous segments.
    Anomalies(AnomaliesArgs),
    /// Explain which segments drive the forecast.
    Explain(ExplainArgs),
    /// Benchmark algorithms across datasets.
    Bench(BenchArgs),
    /// Fit a complexity model to (size, time) measurements.
    Complexity(ComplexityArgs),
}

#[derive(Args)]
struct EngineArgs {
    /// Segment window size (default: adaptive).
    #[arg(long)]
    window: Option<usize>,
    /// Forecast horizon.
    #[arg(long, default_value_t = 1)]
    horizon: usize,
    /// Comma-separated similarity methods.
    #[arg(long, default_value = "cosine,euclidean,dtw")]
    methods: String,
    /// Random seed (SPINEX_SEED applies when absent).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_dynamic_window: bool,
    #[arg(long)]
    no_multi_level: bool,
    #[arg(long)]
    no_dynamic_threshold: bool,
}

impl EngineArgs {
    fn seed(&self) -> u64 {
        resolve_seed(self.seed)
    }

    fn config(&self) -> Result<EngineConfig, CliError> {
        let methods = parse_methods(&self.methods)?;
        Ok(EngineConfig {
            window_size: self.window,
            forecast_horizon: self.horizon,
            similarity_methods: methods,
            dynamic_window: !self.no_dynamic_window,
            multi_level: !self.no_multi_level,
            dynamic_threshold: !self.no_dynamic_threshold,
            seed: self.seed(),
        })
    }
}

#[derive(Args)]
struct InputArgs {
    /// Input CSV path.
    #[arg(long, short = 'i')]
    input: PathBuf,
    /// Value column by name or 0-based index (default: last column).
    #[arg(long)]
    column: Option<String>,
}

impl InputArgs {
    fn load(&self) -> Result<TimeSeries, CliError> {
        let selector = self.column.as_deref().map(ColumnSelector::parse);
        load_csv(&self.input, selector.as_ref()).map_err(CliError::Data)
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// One of the 25 synthetic functions (e.g. linear, sine, sawtooth).
    #[arg(long)]
    function: String,
    /// Number of points.
    #[arg(long, short = 'n')]
    n: usize,
    /// Time range upper bound (grid is [0, tmax] inclusive).
    #[arg(long, default_value_t = 10.0)]
    tmax: f64,
    /// Noise sigma (default: the function's catalogue value).
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (stdout when absent).
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ForecastArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Output report path (stdout when absent).
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Also write a plot-ready CSV (index, actual, predicted, bands).
    #[arg(long)]
    series_csv: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Cross-validation splits.
    #[arg(long, default_value_t = 3)]
    splits: usize,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnomaliesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Similarity percentile below which a segment is anomalous.
    #[arg(long, default_value_t = 2.0)]
    percentile: f64,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Neighbors to analyze (and contributor fallback count).
    #[arg(long, short = 'k', default_value_t = 5)]
    k: usize,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Plot-ready neighbor CSV (position, current, one column per neighbor).
    #[arg(long)]
    neighbors_csv: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Synthetic dataset(s) by function id (repeatable).
    #[arg(long = "function")]
    functions: Vec<String>,
    /// CSV dataset path(s), named by file stem (repeatable).
    #[arg(long = "data")]
    data: Vec<PathBuf>,
    /// Points per synthetic dataset.
    #[arg(long, short = 'n', default_value_t = 200)]
    n: usize,
    #[arg(long, default_value_t = 10.0)]
    tmax: f64,
    #[arg(long, default_value_t = 5)]
    horizon: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated algorithms
    /// (spinex,naive,sma,ses,holt_winters,theta,croston,knn_lag).
    #[arg(long, default_value = "spinex,naive,sma,ses,holt_winters,theta,croston,knn_lag")]
    algorithms: String,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    /// Flat records CSV for external tooling.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct ComplexityArgs {
    /// Comma-separated input sizes.
    #[arg(long)]
    sizes: String,
    /// Comma-separated times, same length as sizes.
    #[arg(long)]
    times: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Data(spinex_core::Error),
}

impl From<spinex_core::Error> for CliError {
    fn from(err: spinex_core::Error) -> Self {
        CliError::Data(err)
    }
}

fn resolve_seed(arg: Option<u64>) -> u64 {
    arg.or_else(|| {
        std::env::var("SPINEX_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn parse_methods(spec: &str) -> Result<Vec<SimilarityMethod>, CliError> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| SimilarityMethod::parse(s).map_err(|e| CliError::Usage(e.to_string())))
        .collect()
}

fn parse_f64_list(spec: &str, name: &str) -> Result<Vec<f64>, CliError> {
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad {name} entry {s:?}")))
        })
        .collect()
}

fn emit(text: &str, output: Option<&PathBuf>) -> Result<(), CliError> {
    match output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Data(e.into())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) {
                print!("{err}");
                return ExitCode::SUCCESS;
            }
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Data(err)) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Forecast(args) => forecast(args),
        Command::Evaluate(args) => evaluate(args),
        Command::Anomalies(args) => anomalies(args),
        Command::Explain(args) => explain(args),
        Command::Bench(args) => bench(args),
        Command::Complexity(args) => complexity(args),
    }
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let function = SyntheticFunction::parse(&args.function)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let mut spec = SyntheticSpec::new(function, args.n, args.tmax, resolve_seed(args.seed));
    if let Some(sigma) = args.sigma {
        spec = spec.with_sigma(sigma);
    }
    let series = generate_synthetic(&spec)?;
    match &args.output {
        Some(path) => save_csv(&series, path)?,
        None => {
            let mut text = String::new();
            for v in series.values() {
                writeln!(text, "{v}").expect("string write");
            }
            print!("{text}");
        }
    }
    Ok(())
}

fn forecast(args: ForecastArgs) -> Result<(), CliError> {
    let series = args.input.load()?;
    let seed = args.engine.seed();
    let mut state = EngineState::new(&series, args.engine.config()?)?;
    let result = forecaster::predict(&mut state, &series)?;
    let payload = report::forecast_payload(&result, &state);
    let report = Report::new(ReportKind::Forecast, seed, payload);
    emit(&report.to_json_pretty(), args.output.as_ref())?;

    if let Some(path) = &args.series_csv {
        let mut csv = String::from("index,actual,predicted,ci_lower,ci_upper\n");
        for (i, v) in series.values().iter().enumerate() {
            writeln!(csv, "{i},{v},,,").expect("string write");
        }
        let n = series.len();
        for (j, v) in result.values.iter().enumerate() {
            let lower = result
                .ci_lower
                .as_ref()
                .map_or(String::new(), |b| b[j].to_string());
            let upper = result
                .ci_upper
                .as_ref()
                .map_or(String::new(), |b| b[j].to_string());
            writeln!(csv, "{},,{v},{lower},{upper}", n + j).expect("string write");
        }
        std::fs::write(path, csv).map_err(|e| CliError::Data(e.into()))?;
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let series = args.input.load()?;
    let seed = args.engine.seed();
    let mut state = EngineState::new(&series, args.engine.config()?)?;
    let cv = metrics::cross_validate(&mut state, &series, args.splits)?;
    eprintln!(
        "completed {} of {} split(s)",
        cv.completed,
        cv.plan.len()
    );
    let payload = report::metrics_payload(&cv.metrics);
    let report = Report::new(ReportKind::Evaluation, seed, payload);
    emit(&report.to_json_pretty(), args.output.as_ref())
}

fn anomalies(args: AnomaliesArgs) -> Result<(), CliError> {
    let series = args.input.load()?;
    let seed = args.engine.seed();
    let mut state = EngineState::new(&series, args.engine.config()?)?;
    let (records, threshold) = diagnostics::detect_anomalies(&mut state, &series, args.percentile)?;
    // Cached, so this reproduces the profile the detector used.
    let profile = forecaster::find_similar_segments(&mut state, &series);
    let payload = report::anomaly_payload(&records, threshold, args.percentile, &profile.scores);
    let report = Report::new(ReportKind::Anomalies, seed, payload);
    emit(&report.to_json_pretty(), args.output.as_ref())
}

fn explain(args: ExplainArgs) -> Result<(), CliError> {
    let series = args.input.load()?;
    let seed = args.engine.seed();
    let mut state = EngineState::new(&series, args.engine.config()?)?;
    let explain = diagnostics::explainability_report(&mut state, &series, args.k)?;
    let neighbors = diagnostics::nearest_neighbors(&mut state, &series, args.k)?;

    let mut neighbor_rows = Vec::new();
    for &(index, score) in &neighbors {
        let analysis = diagnostics::analyze_segment_similarity(&state, &series, index)?;
        let scores: serde_json::Map<String, serde_json::Value> = analysis
            .similarity_scores
            .iter()
            .map(|(m, v)| (m.name().to_string(), serde_json::json!(v)))
            .collect();
        neighbor_rows.push(serde_json::json!({
            "index": index,
            "overall_similarity": score,
            "scores": scores,
            "top_contributing_features": analysis.top_contributing_features,
        }));
    }

    let mut payload = report::explainability_payload(&explain);
    payload
        .as_object_mut()
        .expect("explainability payload is an object")
        .insert("neighbors".into(), serde_json::Value::Array(neighbor_rows));
    let report = Report::new(ReportKind::Explainability, seed, payload);
    emit(&report.to_json_pretty(), args.output.as_ref())?;

    if let Some(path) = &args.neighbors_csv {
        let segments = spinex_core::segmentation::extract_segments(&series, state.window_size)?;
        let mut header = String::from("position,current");
        for (index, _) in &neighbors {
            write!(header, ",neighbor_{index}").expect("string write");
        }
        let mut csv = header + "\n";
        for (pos, &value) in segments.last_row().iter().enumerate() {
            let mut row = format!("{pos},{value}");
            for &(index, _) in &neighbors {
                write!(row, ",{}", segments.row(index)[pos]).expect("string write");
            }
            csv.push_str(&row);
            csv.push('\n');
        }
        std::fs::write(path, csv).map_err(|e| CliError::Data(e.into()))?;
    }
    Ok(())
}

fn bench(args: BenchArgs) -> Result<(), CliError> {
    if args.functions.is_empty() && args.data.is_empty() {
        return Err(CliError::Usage(
            "provide at least one --function or --data dataset".into(),
        ));
    }
    let seed = resolve_seed(args.seed);

    let mut datasets: Vec<(String, TimeSeries)> = Vec::new();
    for name in &args.functions {
        let function =
            SyntheticFunction::parse(name).map_err(|e| CliError::Usage(e.to_string()))?;
        let spec = SyntheticSpec::new(function, args.n, args.tmax, seed);
        datasets.push((function.id().to_string(), generate_synthetic(&spec)?));
    }
    for path in &args.data {
        let name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| path.display().to_string());
        datasets.push((name, load_csv(path, None)?));
    }

    let mut algorithms: Vec<Box<dyn Forecaster>> = Vec::new();
    for name in args.algorithms.split(',').filter(|s| !s.trim().is_empty()) {
        let forecaster: Box<dyn Forecaster> = match name.trim() {
            "spinex" => Box::new(SpinexForecaster::new(EngineConfig {
                seed,
                ..EngineConfig::default()
            })),
            "naive" => Box::new(baselines::Naive),
            "sma" => Box::new(baselines::Sma::default()),
            "ses" => Box::new(baselines::Ses::default()),
            "holt_winters" => Box::new(baselines::HoltWinters::default()),
            "theta" => Box::new(baselines::Theta),
            "croston" => Box::new(baselines::Croston::default()),
            "knn_lag" => Box::new(baselines::KnnLag::default()),
            other => return Err(CliError::Usage(format!("unknown algorithm {other:?}"))),
        };
        algorithms.push(forecaster);
    }

    let records = bench::run_benchmark(&datasets, &algorithms, args.horizon);
    for record in records.iter().filter(|r| r.failure.is_some()) {
        eprintln!(
            "{} on {}: {}",
            record.algorithm,
            record.dataset,
            record.failure.as_deref().unwrap_or("")
        );
    }
    let average = bench::rank_average(&records);
    let normalized = bench::rank_normalized(&records);
    let wins = bench::rank_wins(&records);
    let pareto = bench::pareto_frontier(&records);
    let payload = report::benchmark_payload(
        args.horizon,
        seed,
        &records,
        (&average, &normalized, &wins),
        &pareto,
    );
    let report = Report::new(ReportKind::Benchmark, seed, payload);
    emit(&report.to_json_pretty(), args.output.as_ref())?;

    if let Some(path) = &args.csv {
        std::fs::write(path, report::benchmark_csv(&records))
            .map_err(|e| CliError::Data(e.into()))?;
    }
    Ok(())
}

fn complexity(args: ComplexityArgs) -> Result<(), CliError> {
    let sizes = parse_f64_list(&args.sizes, "sizes")?;
    let times = parse_f64_list(&args.times, "times")?;
    let fit = fit_complexity(&sizes, &times)?;
    let payload = report::complexity_payload(&sizes, &times, &fit);
    let report = Report::new(ReportKind::Complexity, resolve_seed(args.seed), payload);
    emit(&report.to_json_pretty(), args.output.as_ref())
}
