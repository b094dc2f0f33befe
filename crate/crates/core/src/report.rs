//! The JSON report envelope and the payload builders for each command.
//!
//! Non-finite floats serialize as `null` (serde_json's behavior), which
//! is how undefined metrics are represented on the wire.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bench::{BenchmarkRecord, ComplexityFit, ParetoRow, RankingTable};
use crate::diagnostics::{AnomalyRecord, ExplainabilityReport};
use crate::engine::EngineState;
use crate::error::{Error, Result};
use crate::forecaster::ForecastResult;
use crate::metrics::MetricRecord;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Forecast,
    Anomalies,
    Explainability,
    Benchmark,
    Complexity,
    Evaluation,
}

/// The envelope every report is wrapped in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub kind: ReportKind,
    pub generated_by: String,
    pub seed: u64,
    pub payload: Value,
}

impl Report {
    pub fn new(kind: ReportKind, seed: u64, payload: Value) -> Self {
        Self {
            kind,
            generated_by: format!("spinex {}", env!("CARGO_PKG_VERSION")),
            seed,
            payload,
        }
    }

    pub fn to_json_pretty(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("report serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::InvalidInput(format!("bad report: {e}")))
    }
}

pub fn forecast_payload(result: &ForecastResult, state: &EngineState) -> Value {
    json!({
        "values": result.values,
        "ci_lower": result.ci_lower,
        "ci_upper": result.ci_upper,
        "provenance": result.provenance,
        "window_size": state.window_size,
        "threshold": state.threshold,
    })
}

pub fn anomaly_payload(
    anomalies: &[AnomalyRecord],
    threshold: f64,
    percentile: f64,
    scores: &[f64],
) -> Value {
    let rows: Vec<Value> = anomalies
        .iter()
        .map(|a| {
            json!({
                "start": a.start_index,
                "end": a.end_index,
                "score": a.similarity_score,
            })
        })
        .collect();
    json!({
        "threshold": threshold,
        "percentile": percentile,
        "anomalies": rows,
        "score_stats": {
            "min": scores.iter().copied().fold(f64::INFINITY, f64::min),
            "max": scores.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            "mean": stats::mean(scores),
            "median": stats::median(scores),
        },
    })
}

pub fn explainability_payload(report: &ExplainabilityReport) -> Value {
    serde_json::to_value(report).expect("explainability serialization cannot fail")
}

/// Flat object with the eleven metric fields; NaN becomes null.
pub fn metrics_payload(record: &MetricRecord) -> Value {
    let mut map = serde_json::Map::new();
    for (name, value) in record.fields() {
        map.insert(name.to_string(), json!(value));
    }
    Value::Object(map)
}

pub fn benchmark_payload(
    horizon: usize,
    seed: u64,
    records: &[BenchmarkRecord],
    rankings: (&RankingTable, &RankingTable, &RankingTable),
    pareto: &[ParetoRow],
) -> Value {
    json!({
        "horizon": horizon,
        "seed": seed,
        "records": records,
        "rankings": {
            "average": rankings.0,
            "normalized": rankings.1,
            "wins": rankings.2,
        },
        "pareto": pareto,
    })
}

pub fn complexity_payload(sizes: &[f64], times: &[f64], fit: &ComplexityFit) -> Value {
    json!({
        "sizes": sizes,
        "times": times,
        "class": fit.class,
        "exponent_or_rate": fit.exponent_or_rate,
        "r2": fit.r_squared,
        "big_o": fit.big_o,
    })
}

/// Flat benchmark CSV (algorithm, dataset, metric, value) for external
/// tooling; NaN values are left as empty cells.
pub fn benchmark_csv(records: &[BenchmarkRecord]) -> String {
    let mut out = String::from("algorithm,dataset,metric,value\n");
    for r in records {
        for metric in crate::bench::BENCH_METRICS {
            let value = r.metric(metric);
            let cell = if value.is_nan() {
                String::new()
            } else {
                format!("{value}")
            };
            out.push_str(&format!("{},{},{},{}\n", r.algorithm, r.dataset, metric, cell));
        }
    }
    out
}
