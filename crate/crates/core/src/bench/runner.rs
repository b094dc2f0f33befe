//! Benchmark execution: every algorithm against every dataset on a
//! common holdout.

use serde::Serialize;

use crate::baselines::Forecaster;
use crate::engine::{EngineConfig, EngineState};
use crate::error::Result;
use crate::forecaster;
use crate::metrics;
use crate::series::TimeSeries;

/// One (algorithm, dataset) outcome with the four benchmark metrics.
/// Failures keep the record with NaN metrics and a reason.
#[derive(Debug, Clone, Serialize)]
pub struct BenchmarkRecord {
    pub algorithm: String,
    pub dataset: String,
    pub direction_accuracy: f64,
    pub dtw_cost: f64,
    pub mase: f64,
    pub mad: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure: Option<String>,
}

impl BenchmarkRecord {
    pub fn metric(&self, name: &str) -> f64 {
        match name {
            "direction_accuracy" => self.direction_accuracy,
            "dtw_cost" => self.dtw_cost,
            "mase" => self.mase,
            "mad" => self.mad,
            _ => f64::NAN,
        }
    }
}

/// The four benchmark metrics in report order. Direction accuracy is
/// maximized; the rest are minimized.
pub const BENCH_METRICS: [&str; 4] = ["direction_accuracy", "dtw_cost", "mase", "mad"];

pub fn metric_is_maximized(name: &str) -> bool {
    name == "direction_accuracy"
}

/// The engine exposed through the common [`Forecaster`] surface: a fresh
/// engine per call, so benchmark runs stay independent.
pub struct SpinexForecaster {
    pub config: EngineConfig,
}

impl SpinexForecaster {
    pub fn new(config: EngineConfig) -> Self {
        Self { config }
    }
}

impl Forecaster for SpinexForecaster {
    fn name(&self) -> &str {
        "spinex"
    }

    fn forecast(
        &self,
        series: &TimeSeries,
        horizon: usize,
    ) -> Result<forecaster::ForecastResult> {
        let config = EngineConfig {
            forecast_horizon: horizon,
            ..self.config.clone()
        };
        let mut state = EngineState::new(series, config)?;
        forecaster::predict(&mut state, series)
    }
}

/// Runs every algorithm on every dataset: the final `horizon` points are
/// held out, the prefix is forecast, and DA / DTW / MASE / MAD are
/// computed against the holdout. Per-pair failures are recorded, never
/// fatal.
pub fn run_benchmark(
    datasets: &[(String, TimeSeries)],
    algorithms: &[Box<dyn Forecaster>],
    horizon: usize,
) -> Vec<BenchmarkRecord> {
    let mut records = Vec::with_capacity(datasets.len() * algorithms.len());
    for algorithm in algorithms {
        for (dataset_name, series) in datasets {
            records.push(run_pair(algorithm.as_ref(), dataset_name, series, horizon));
        }
    }
    records
}

fn run_pair(
    algorithm: &dyn Forecaster,
    dataset_name: &str,
    series: &TimeSeries,
    horizon: usize,
) -> BenchmarkRecord {
    let nan_record = |failure: String| BenchmarkRecord {
        algorithm: algorithm.name().to_string(),
        dataset: dataset_name.to_string(),
        direction_accuracy: f64::NAN,
        dtw_cost: f64::NAN,
        mase: f64::NAN,
        mad: f64::NAN,
        failure: Some(failure),
    };

    if series.len() <= horizon {
        return nan_record(format!(
            "dataset too short for a {horizon}-point holdout"
        ));
    }
    let split = series.len() - horizon;
    let train = match series.prefix(split) {
        Ok(train) => train,
        Err(err) => return nan_record(err.to_string()),
    };
    let holdout = &series.values()[split..];

    let forecast = match algorithm.forecast(&train, horizon) {
        Ok(forecast) => forecast,
        Err(err) => return nan_record(err.to_string()),
    };
    let k = forecast.values.len().min(holdout.len());
    if k == 0 {
        return nan_record("empty forecast".into());
    }
    match metrics::evaluate(&holdout[..k], &forecast.values[..k]) {
        Ok(record) => BenchmarkRecord {
            algorithm: algorithm.name().to_string(),
            dataset: dataset_name.to_string(),
            direction_accuracy: record.direction_accuracy,
            dtw_cost: record.dtw_cost,
            mase: record.mase,
            mad: record.mad,
            failure: None,
        },
        Err(err) => nan_record(err.to_string()),
    }
}
