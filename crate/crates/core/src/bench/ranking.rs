//! The three ranking schemes over benchmark records.

use std::collections::BTreeSet;

use serde::Serialize;

use super::runner::{metric_is_maximized, BenchmarkRecord, BENCH_METRICS};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RankingScheme {
    Average,
    Normalized,
    Wins,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankingRow {
    pub algorithm: String,
    /// Cross-dataset mean of each metric (report order: DA, DTW, MASE,
    /// MAD), failures excluded.
    pub metric_means: [f64; 4],
    /// Per-metric ranks (average / wins) or normalized scores.
    pub metric_columns: [f64; 4],
    /// Average rank, or average normalized score.
    pub score: f64,
    /// Competition rank: ties share the smaller rank, the next skips.
    pub final_rank: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RankingTable {
    pub scheme: RankingScheme,
    /// Which granularity the per-metric rank columns were computed at.
    pub granularity: &'static str,
    /// Rows sorted by final rank.
    pub rows: Vec<RankingRow>,
}

/// Fractional ranks: 1-based, ties get the average of their positions,
/// NaN entries rank last (sharing averaged bottom positions).
fn fractional_ranks(values: &[f64], ascending: bool) -> Vec<f64> {
    ranks_impl(values, ascending, true)
}

/// Competition ranks: 1-based, ties share the minimum position.
fn competition_ranks(values: &[f64], ascending: bool) -> Vec<f64> {
    ranks_impl(values, ascending, false)
}

fn ranks_impl(values: &[f64], ascending: bool, fractional: bool) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        let (a, b) = (values[i], values[j]);
        match (a.is_nan(), b.is_nan()) {
            (true, true) => std::cmp::Ordering::Equal,
            (true, false) => std::cmp::Ordering::Greater, // NaN last
            (false, true) => std::cmp::Ordering::Less,
            (false, false) => {
                let cmp = a.partial_cmp(&b).unwrap();
                if ascending {
                    cmp
                } else {
                    cmp.reverse()
                }
            }
        }
    });
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        let tied = |x: f64, y: f64| (x.is_nan() && y.is_nan()) || x == y;
        while j + 1 < n && tied(values[order[j + 1]], values[order[i]]) {
            j += 1;
        }
        let rank = if fractional {
            (i + j + 2) as f64 / 2.0
        } else {
            (i + 1) as f64
        };
        for k in i..=j {
            ranks[order[k]] = rank;
        }
        i = j + 1;
    }
    ranks
}

fn algorithms_in_order(records: &[BenchmarkRecord]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in records {
        if seen.insert(r.algorithm.clone()) {
            out.push(r.algorithm.clone());
        }
    }
    out
}

fn datasets_in_order(records: &[BenchmarkRecord]) -> Vec<String> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in records {
        if seen.insert(r.dataset.clone()) {
            out.push(r.dataset.clone());
        }
    }
    out
}

/// Cross-dataset mean per algorithm per metric, NaN excluded.
fn metric_means(records: &[BenchmarkRecord], algorithms: &[String]) -> Vec<[f64; 4]> {
    algorithms
        .iter()
        .map(|alg| {
            let mut means = [f64::NAN; 4];
            for (m, metric) in BENCH_METRICS.iter().enumerate() {
                let values: Vec<f64> = records
                    .iter()
                    .filter(|r| &r.algorithm == alg)
                    .map(|r| r.metric(metric))
                    .collect();
                means[m] = stats::nan_mean(&values);
            }
            means
        })
        .collect()
}

fn final_ranks(scores: &[f64]) -> Vec<usize> {
    competition_ranks(scores, true)
        .into_iter()
        .map(|r| r as usize)
        .collect()
}

fn assemble(
    scheme: RankingScheme,
    granularity: &'static str,
    algorithms: Vec<String>,
    means: Vec<[f64; 4]>,
    columns: Vec<[f64; 4]>,
    scores: Vec<f64>,
) -> RankingTable {
    let finals = final_ranks(&scores);
    let mut rows: Vec<RankingRow> = algorithms
        .into_iter()
        .enumerate()
        .map(|(i, algorithm)| RankingRow {
            algorithm,
            metric_means: means[i],
            metric_columns: columns[i],
            score: scores[i],
            final_rank: finals[i],
        })
        .collect();
    rows.sort_by(|a, b| {
        a.final_rank
            .cmp(&b.final_rank)
            .then_with(|| a.algorithm.cmp(&b.algorithm))
    });
    RankingTable {
        scheme,
        granularity,
        rows,
    }
}

/// Average-rank scheme: algorithms are ranked per metric within each
/// dataset (fractional ranks for ties, NaN last), the ranks are averaged
/// across datasets per metric, and the final rank orders the mean of the
/// four columns.
pub fn rank_average(records: &[BenchmarkRecord]) -> RankingTable {
    let algorithms = algorithms_in_order(records);
    let datasets = datasets_in_order(records);
    let n = algorithms.len();

    let mut rank_sums = vec![[0.0f64; 4]; n];
    let mut rank_counts = vec![[0usize; 4]; n];
    for dataset in &datasets {
        for (m, metric) in BENCH_METRICS.iter().enumerate() {
            let column: Vec<f64> = algorithms
                .iter()
                .map(|alg| {
                    records
                        .iter()
                        .find(|r| &r.algorithm == alg && &r.dataset == dataset)
                        .map_or(f64::NAN, |r| r.metric(metric))
                })
                .collect();
            let ranks = fractional_ranks(&column, !metric_is_maximized(metric));
            for (i, rank) in ranks.into_iter().enumerate() {
                rank_sums[i][m] += rank;
                rank_counts[i][m] += 1;
            }
        }
    }
    let columns: Vec<[f64; 4]> = (0..n)
        .map(|i| {
            let mut row = [f64::NAN; 4];
            for m in 0..4 {
                if rank_counts[i][m] > 0 {
                    row[m] = rank_sums[i][m] / rank_counts[i][m] as f64;
                }
            }
            row
        })
        .collect();
    let scores: Vec<f64> = columns.iter().map(|c| stats::mean(c)).collect();
    let means = metric_means(records, &algorithms);
    assemble(
        RankingScheme::Average,
        "per-dataset ranks",
        algorithms,
        means,
        columns,
        scores,
    )
}

/// Normalized scheme: cross-dataset metric means are min-max normalized
/// per metric with direction accuracy inverted, so 0 is best everywhere;
/// the score is the mean of the four normalized columns. A constant
/// column normalizes to 0 for every algorithm.
pub fn rank_normalized(records: &[BenchmarkRecord]) -> RankingTable {
    let algorithms = algorithms_in_order(records);
    let means = metric_means(records, &algorithms);
    let n = algorithms.len();

    let mut columns = vec![[0.0f64; 4]; n];
    for (m, metric) in BENCH_METRICS.iter().enumerate() {
        let raw: Vec<f64> = means.iter().map(|row| row[m]).collect();
        let finite: Vec<f64> = raw.iter().copied().filter(|v| !v.is_nan()).collect();
        let (min, max) = (
            finite.iter().copied().fold(f64::INFINITY, f64::min),
            finite.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        );
        let range = max - min;
        for (i, &value) in raw.iter().enumerate() {
            columns[i][m] = if value.is_nan() {
                f64::NAN
            } else if range == 0.0 || finite.is_empty() {
                0.0
            } else if metric_is_maximized(metric) {
                (max - value) / range
            } else {
                (value - min) / range
            };
        }
    }
    let scores: Vec<f64> = columns.iter().map(|c| stats::mean(c)).collect();
    assemble(
        RankingScheme::Normalized,
        "cross-dataset means",
        algorithms,
        means,
        columns.clone(),
        scores,
    )
}

/// Wins scheme: integer competition ranks per metric on the
/// cross-dataset means (ties share the minimum rank), final rank by the
/// average of the four.
pub fn rank_wins(records: &[BenchmarkRecord]) -> RankingTable {
    let algorithms = algorithms_in_order(records);
    let means = metric_means(records, &algorithms);
    let n = algorithms.len();

    let mut columns = vec![[0.0f64; 4]; n];
    for (m, metric) in BENCH_METRICS.iter().enumerate() {
        let raw: Vec<f64> = means.iter().map(|row| row[m]).collect();
        let ranks = competition_ranks(&raw, !metric_is_maximized(metric));
        for i in 0..n {
            columns[i][m] = ranks[i];
        }
    }
    let scores: Vec<f64> = columns.iter().map(|c| stats::mean(c)).collect();
    assemble(
        RankingScheme::Wins,
        "cross-dataset means",
        algorithms,
        means,
        columns,
        scores,
    )
}
