//! Pareto efficiency over the benchmark metrics.

use serde::Serialize;

use super::runner::{metric_is_maximized, BenchmarkRecord, BENCH_METRICS};
use crate::stats;

#[derive(Debug, Clone, Serialize)]
pub struct ParetoRow {
    pub algorithm: String,
    /// Cross-dataset metric means in report order.
    pub metric_means: [f64; 4],
    pub efficient: bool,
}

/// Marks each algorithm Pareto-efficient or dominated. Metrics are
/// min-max normalized and oriented so smaller is better (direction
/// accuracy inverted); `a` is dominated when some `b` is <= everywhere
/// and < somewhere. NaN metrics count as worst. Dominance only depends
/// on per-metric order, so the result is invariant under any strictly
/// monotone rescaling of the inputs.
pub fn pareto_frontier(records: &[BenchmarkRecord]) -> Vec<ParetoRow> {
    let mut algorithms: Vec<String> = Vec::new();
    for r in records {
        if !algorithms.contains(&r.algorithm) {
            algorithms.push(r.algorithm.clone());
        }
    }
    let means: Vec<[f64; 4]> = algorithms
        .iter()
        .map(|alg| {
            let mut row = [f64::NAN; 4];
            for (m, metric) in BENCH_METRICS.iter().enumerate() {
                let values: Vec<f64> = records
                    .iter()
                    .filter(|r| &r.algorithm == alg)
                    .map(|r| r.metric(metric))
                    .collect();
                row[m] = stats::nan_mean(&values);
            }
            row
        })
        .collect();

    // Normalize to [0, 1] with 0 best for every column.
    let n = algorithms.len();
    let mut oriented = vec![[0.0f64; 4]; n];
    for (m, metric) in BENCH_METRICS.iter().enumerate() {
        let column: Vec<f64> = means.iter().map(|row| row[m]).collect();
        let finite: Vec<f64> = column.iter().copied().filter(|v| !v.is_nan()).collect();
        let min = finite.iter().copied().fold(f64::INFINITY, f64::min);
        let max = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = max - min;
        for (i, &value) in column.iter().enumerate() {
            oriented[i][m] = if value.is_nan() {
                f64::INFINITY
            } else if range == 0.0 {
                0.0
            } else if metric_is_maximized(metric) {
                (max - value) / range
            } else {
                (value - min) / range
            };
        }
    }

    let dominated = |i: usize| -> bool {
        (0..n).any(|j| {
            j != i
                && (0..4).all(|m| oriented[j][m] <= oriented[i][m])
                && (0..4).any(|m| oriented[j][m] < oriented[i][m])
        })
    };

    algorithms
        .into_iter()
        .enumerate()
        .map(|(i, algorithm)| ParetoRow {
            algorithm,
            metric_means: means[i],
            efficient: !dominated(i),
        })
        .collect()
}
