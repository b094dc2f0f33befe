//! The prediction pipeline: multi-level similarity aggregation, dynamic
//! thresholding, similarity-weighted forecasting with shift alignment,
//! and the decomposition fallback predictor.

use std::collections::hash_map::Entry;

use serde::{Deserialize, Serialize};

use crate::engine::EngineState;
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::segmentation::{self, extract_segments};
use crate::series::TimeSeries;
use crate::similarity::{pairwise_similarity, SimilarityMethod};
use crate::stats;

/// How a forecast was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    #[serde(rename = "similarity")]
    SimilarityPath,
    Fallback,
}

/// Point forecast over the horizon, with confidence bands on the
/// fallback path only.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastResult {
    pub values: Vec<f64>,
    pub ci_lower: Option<Vec<f64>>,
    pub ci_upper: Option<Vec<f64>>,
    pub provenance: Provenance,
}

/// Similarity of each historical segment to the latest segment, ordered
/// by segment start index. When multi-level windows disagree on length
/// the vectors are tail-aligned before averaging, so the profile indexes
/// the primary window's segments from the end.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityProfile {
    pub scores: Vec<f64>,
}

impl SimilarityProfile {
    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Averages per-method similarity rows across one or three window sizes.
///
/// Window sizes yielding fewer than two segments are skipped; DTW is
/// skipped beyond 500 segments. An empty result falls back to the
/// autocorrelation profile.
pub fn find_similar_segments(state: &mut EngineState, series: &TimeSeries) -> SimilarityProfile {
    let primary = state.window_size;
    let window_sizes: Vec<usize> = if state.multi_level {
        vec![
            (primary / 2).max(2),
            primary,
            (series.len() / 4).min(primary * 2),
        ]
    } else {
        vec![primary]
    };
    let methods = state.similarity_methods.clone();

    let mut per_window: Vec<Vec<f64>> = Vec::new();
    for w_size in window_sizes {
        let Ok(segments) = extract_segments(series, w_size) else {
            continue;
        };
        if segments.n_segments() < 2 {
            continue;
        }
        let n_segments = segments.n_segments();
        let digest = segments.digest();
        let segments = state.segment_cache.entry(digest).or_insert(segments);

        let mut method_rows: Vec<Vec<f64>> = Vec::new();
        for &method in &methods {
            if method == SimilarityMethod::Dtw && n_segments > 500 {
                continue;
            }
            let row = match state.similarity_cache.entry((digest, method)) {
                Entry::Occupied(entry) => entry.get().last_row_historical(),
                Entry::Vacant(entry) => match pairwise_similarity(segments, method) {
                    Ok(matrix) => {
                        let row = matrix.last_row_historical();
                        entry.insert(matrix);
                        row
                    }
                    Err(_) => continue,
                },
            };
            method_rows.push(row);
        }
        if method_rows.is_empty() {
            continue;
        }
        per_window.push(tail_aligned_mean(&method_rows));
    }

    if per_window.is_empty() {
        return fallback_similarity(series);
    }
    SimilarityProfile {
        scores: tail_aligned_mean(&per_window),
    }
}

/// Truncates each vector to the common (shortest) length keeping the
/// tail, then averages element-wise ignoring NaN.
fn tail_aligned_mean(rows: &[Vec<f64>]) -> Vec<f64> {
    let min_len = rows.iter().map(Vec::len).min().unwrap_or(0);
    (0..min_len)
        .map(|i| {
            let column: Vec<f64> = rows.iter().map(|r| r[r.len() - min_len + i]).collect();
            stats::nan_mean(&column)
        })
        .collect()
}

/// Autocorrelation-based similarity used when segment similarity is not
/// applicable: scores[k] = acf(k) / acf(0) over the raw (uncentered)
/// autocorrelation.
pub fn fallback_similarity(series: &TimeSeries) -> SimilarityProfile {
    let values = series.values();
    let n = values.len();
    let acf0: f64 = values.iter().map(|v| v * v).sum();
    if acf0 == 0.0 {
        let mut scores = vec![0.0; n];
        scores[0] = 1.0;
        return SimilarityProfile { scores };
    }
    let scores = (0..n)
        .map(|lag| {
            let dot: f64 = (0..n - lag).map(|t| values[t] * values[t + lag]).sum();
            dot / acf0
        })
        .collect();
    SimilarityProfile { scores }
}

/// Adaptive cutoff over a similarity profile.
///
/// Dynamic mode: mean + std, relaxed to the 90th percentile when fewer
/// than five scores exceed it. Static mode: the 95th percentile.
pub fn dynamic_threshold(state: &EngineState, profile: &SimilarityProfile) -> f64 {
    let scores = &profile.scores;
    if state.dynamic_threshold {
        let base = stats::mean(scores) + stats::std_dev(scores);
        let above = scores.iter().filter(|&&s| s > base).count();
        if above < 5 {
            stats::percentile(scores, 90.0)
        } else {
            base
        }
    } else {
        stats::percentile(scores, 95.0)
    }
}

/// Forecasts `state.forecast_horizon` steps ahead.
///
/// Candidate segments are selected by percentile descent (95th down to
/// 75th, requiring three candidates with in-range future windows); their
/// futures are shift-aligned to the last observation and combined with
/// similarity weights, so a similarity-path forecast starts exactly at
/// the last observed value. Every internal failure routes to
/// [`fallback_predict`]; the in-sample performance buffers are updated
/// either way.
pub fn predict(state: &mut EngineState, series: &TimeSeries) -> Result<ForecastResult> {
    if series.len() < 4 {
        return Err(Error::TooShort {
            needed: 4,
            got: series.len(),
        });
    }
    segmentation::adjust_dynamic_parameters(state, series);

    let result = match similarity_path(state, series) {
        Some(result) => result,
        None => fallback_predict(state, series, state.forecast_horizon, 2)?,
    };

    let k = result.values.len();
    if k > 0 && k <= series.len() {
        let actual = &series.values()[series.len() - k..];
        let error = mean_squared_error(actual, &result.values);
        let similarity = stats::pearson(actual, &result.values);
        state.record_performance(error, similarity);
    } else {
        state.record_performance(f64::NAN, f64::NAN);
    }
    Ok(result)
}

fn similarity_path(state: &mut EngineState, series: &TimeSeries) -> Option<ForecastResult> {
    let horizon = state.forecast_horizon;
    let len = series.len();
    let profile = find_similar_segments(state, series);
    if profile.is_empty() {
        return None;
    }
    let threshold = dynamic_threshold(state, &profile);
    state.threshold = threshold;

    let scores = &profile.scores;
    let window = state.window_size;
    let mut valid: Vec<usize> = Vec::new();
    for pct in [95.0, 90.0, 85.0, 80.0, 75.0] {
        let cut = stats::percentile(scores, pct);
        valid = (0..scores.len())
            .filter(|&i| scores[i] > cut && i + window + horizon <= len)
            .collect();
        if valid.len() >= 3 {
            break;
        }
    }
    if valid.is_empty() {
        return None;
    }

    let values = series.values();
    let mut futures: Vec<&[f64]> = Vec::new();
    let mut weights: Vec<f64> = Vec::new();
    for &idx in &valid {
        let start = idx + window;
        let end = start + horizon;
        if end <= len {
            futures.push(&values[start..end]);
            weights.push(scores[idx]);
        }
    }
    if futures.is_empty() {
        return None;
    }
    // Negative or non-finite weights would break the convex combination
    // that pins the first forecast value to the last observation.
    let weight_sum: f64 = weights.iter().sum();
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || weight_sum <= 0.0 {
        return None;
    }

    let last = series.last();
    let mut forecast = vec![last; horizon];
    for (step, slot) in forecast.iter_mut().enumerate().skip(1) {
        let acc: f64 = futures
            .iter()
            .zip(&weights)
            .map(|(future, weight)| weight * (future[step] - future[0]))
            .sum();
        *slot = last + acc / weight_sum;
    }
    Some(ForecastResult {
        values: forecast,
        ci_lower: None,
        ci_upper: None,
        provenance: Provenance::SimilarityPath,
    })
}

/// Decomposition forecast: moving-average trend with an adaptively sized
/// window, lagged-correlation seasonality (up to `num_seasons` periods),
/// anomaly-cleaned residuals, a cubic trend model, and Monte-Carlo
/// residual simulation for the confidence bands.
pub fn fallback_predict(
    state: &EngineState,
    series: &TimeSeries,
    num_points: usize,
    num_seasons: usize,
) -> Result<ForecastResult> {
    if !(1..=4).contains(&num_seasons) {
        return Err(Error::InvalidInput(format!(
            "num_seasons must be in [1, 4], got {num_seasons}"
        )));
    }
    let values = series.values();
    let len = values.len();
    if len < num_points * 2 {
        return Err(Error::InsufficientData {
            needed: num_points * 2,
            got: len,
        });
    }
    let horizon = state.forecast_horizon;

    let trend_window = adaptive_trend_window(values);
    let trend = moving_average(values, trend_window);
    let detrended: Vec<f64> = values[trend_window - 1..]
        .iter()
        .zip(&trend)
        .map(|(v, t)| v - t)
        .collect();

    let max_period = num_points.min(detrended.len() / 2).max(4);
    let periods = detect_seasonal_periods(&detrended, max_period, num_seasons);
    let seasonals: Vec<Vec<f64>> = periods.iter().map(|&p| phase_means(&detrended, p)).collect();

    let mut combined_seasonal = vec![0.0; detrended.len()];
    for seasonal in &seasonals {
        for (i, slot) in combined_seasonal.iter_mut().enumerate() {
            *slot += seasonal[i % seasonal.len()];
        }
    }
    let residuals: Vec<f64> = detrended
        .iter()
        .zip(&combined_seasonal)
        .map(|(d, s)| d - s)
        .collect();

    // Residual anomalies are replaced with the median to stabilize the
    // weighted statistics below.
    let res_mean = stats::mean(&residuals);
    let res_std = stats::std_dev(&residuals);
    let res_median = stats::median(&residuals);
    let cleaned: Vec<f64> = residuals
        .iter()
        .map(|&r| {
            if (r - res_mean).abs() > 3.0 * res_std {
                res_median
            } else {
                r
            }
        })
        .collect();

    let xs: Vec<f64> = (0..len).map(|i| i as f64).collect();
    let trend_model = stats::polyfit(&xs, values, 3);
    let future_trend: Vec<f64> = (len..len + horizon).map(|i| trend_model(i as f64)).collect();

    let mut future_seasonal = vec![0.0; horizon];
    for seasonal in &seasonals {
        for (i, slot) in future_seasonal.iter_mut().enumerate() {
            *slot += seasonal[i % seasonal.len()];
        }
    }

    let (residual_mean, ci_lower_res, ci_upper_res) =
        simulate_residuals(&cleaned, horizon, 0.95, state.seed);

    let values_out: Vec<f64> = (0..horizon)
        .map(|i| future_trend[i] + future_seasonal[i] + residual_mean[i])
        .collect();
    let ci_lower: Vec<f64> = (0..horizon)
        .map(|i| future_trend[i] + future_seasonal[i] + ci_lower_res[i])
        .collect();
    let ci_upper: Vec<f64> = (0..horizon)
        .map(|i| future_trend[i] + future_seasonal[i] + ci_upper_res[i])
        .collect();

    Ok(ForecastResult {
        values: values_out,
        ci_lower: Some(ci_lower),
        ci_upper: Some(ci_upper),
        provenance: Provenance::Fallback,
    })
}

/// Trend window minimizing the MSE of the trend-subtracted data, found by
/// golden-section search over [10, len/2] on the integer-rounded
/// objective.
fn adaptive_trend_window(values: &[f64]) -> usize {
    let len = values.len();
    let hi = len / 2;
    if hi <= 10 {
        return hi.max(2);
    }
    let objective = |w: f64| {
        let w = (w as usize).clamp(2, hi);
        let trend = moving_average(values, w);
        let diffs: Vec<f64> = values[w - 1..]
            .iter()
            .zip(&trend)
            .map(|(v, t)| v - t)
            .collect();
        diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len() as f64
    };
    let best = stats::golden_section_min(10.0, hi as f64, objective);
    (best as usize).clamp(10, hi)
}

/// Valid-mode moving average: output length len - window + 1.
fn moving_average(values: &[f64], window: usize) -> Vec<f64> {
    let window = window.max(1).min(values.len());
    let mut out = Vec::with_capacity(values.len() - window + 1);
    let mut sum: f64 = values[..window].iter().sum();
    out.push(sum / window as f64);
    for i in window..values.len() {
        sum += values[i] - values[i - window];
        out.push(sum / window as f64);
    }
    out
}

/// Greedy lagged-correlation peak picking: repeatedly take the lag with
/// the highest correlation, then suppress it.
fn detect_seasonal_periods(detrended: &[f64], max_period: usize, num_seasons: usize) -> Vec<usize> {
    let n = detrended.len();
    let mut correlations: Vec<f64> = (1..max_period)
        .map(|lag| {
            if n > lag + 1 {
                stats::pearson(&detrended[..n - lag], &detrended[lag..])
            } else {
                f64::NAN
            }
        })
        .collect();
    let mut seasons = Vec::new();
    for _ in 0..num_seasons {
        let best = correlations
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap());
        match best {
            Some((idx, &value)) if value > -1.0 => {
                seasons.push(idx + 1);
                correlations[idx] = -1.0;
            }
            _ => break,
        }
    }
    seasons
}

/// Per-phase means of the detrended data at the given period.
fn phase_means(detrended: &[f64], period: usize) -> Vec<f64> {
    (0..period)
        .map(|phase| {
            let slice: Vec<f64> = detrended.iter().skip(phase).step_by(period).copied().collect();
            stats::mean(&slice)
        })
        .collect()
}

/// Exponentially weighted residual statistics plus a 1000-path
/// Monte-Carlo simulation; returns (mean, lower, upper) per step at the
/// given confidence.
fn simulate_residuals(
    residuals: &[f64],
    horizon: usize,
    confidence: f64,
    seed: u64,
) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let n = residuals.len();
    let weights: Vec<f64> = if n == 1 {
        vec![(-1.0f64).exp()]
    } else {
        (0..n)
            .map(|i| (-1.0 + i as f64 / (n - 1) as f64).exp())
            .collect()
    };
    let weight_sum: f64 = weights.iter().sum();
    let weighted_mean: f64 =
        residuals.iter().zip(&weights).map(|(r, w)| r * w).sum::<f64>() / weight_sum;
    let weighted_var: f64 = residuals
        .iter()
        .zip(&weights)
        .map(|(r, w)| w * (r - weighted_mean) * (r - weighted_mean))
        .sum::<f64>()
        / weight_sum;
    let weighted_std = weighted_var.sqrt();

    const PATHS: usize = 1000;
    let mut rng = SeededRng::new(seed);
    let mut draws = vec![0.0; PATHS * horizon];
    for slot in draws.iter_mut() {
        *slot = rng.normal(weighted_mean, weighted_std);
    }
    let mut mean = Vec::with_capacity(horizon);
    let mut lower = Vec::with_capacity(horizon);
    let mut upper = Vec::with_capacity(horizon);
    let lo_q = (1.0 - confidence) / 2.0 * 100.0;
    let hi_q = (1.0 + confidence) / 2.0 * 100.0;
    for step in 0..horizon {
        let column: Vec<f64> = (0..PATHS).map(|p| draws[p * horizon + step]).collect();
        mean.push(stats::mean(&column));
        lower.push(stats::percentile(&column, lo_q));
        upper.push(stats::percentile(&column, hi_q));
    }
    (mean, lower, upper)
}

/// Picks the seasonality count in [1, 4] whose fallback forecast has the
/// lowest MSE against the trailing observations; ties break toward the
/// smaller count.
pub fn tune_hyperparameters(state: &EngineState, series: &TimeSeries) -> Result<usize> {
    let values = series.values();
    let mut best = (1usize, f64::INFINITY);
    for num_seasons in 1..=4 {
        let forecast = fallback_predict(state, series, 20, num_seasons)?;
        let k = forecast.values.len().min(values.len());
        let actual = &values[values.len() - k..];
        let mse = mean_squared_error(actual, &forecast.values[..k]);
        if mse < best.1 {
            best = (num_seasons, mse);
        }
    }
    Ok(best.0)
}

pub(crate) fn mean_squared_error(actual: &[f64], predicted: &[f64]) -> f64 {
    debug_assert_eq!(actual.len(), predicted.len());
    if actual.is_empty() {
        return f64::NAN;
    }
    actual
        .iter()
        .zip(predicted)
        .map(|(a, p)| (a - p) * (a - p))
        .sum::<f64>()
        / actual.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values).unwrap()
    }

    fn sawtooth(period: usize, repeats: usize) -> TimeSeries {
        series(
            (0..period * repeats)
                .map(|i| (i % period) as f64 / period as f64)
                .collect(),
        )
    }

    #[test]
    fn fallback_similarity_normalizes_lag_zero() {
        let s = series(vec![1.0, -2.0, 0.5, 3.0]);
        let profile = fallback_similarity(&s);
        assert_eq!(profile.scores[0], 1.0);
        assert_eq!(profile.len(), 4);
    }

    #[test]
    fn fallback_similarity_peaks_at_sine_period() {
        let p = 25usize;
        let s = series(
            (0..500)
                .map(|i| (2.0 * std::f64::consts::PI * i as f64 / p as f64).sin())
                .collect(),
        );
        let profile = fallback_similarity(&s);
        let scores = &profile.scores;
        assert!(scores[p] > scores[p - 2] && scores[p] > scores[p + 2]);
        assert!(scores[p] > 0.8);
    }

    #[test]
    fn fallback_similarity_of_white_noise_is_flat() {
        let mut rng = crate::rng::SeededRng::new(21);
        let s = series((0..1000).map(|_| rng.standard_normal()).collect());
        let profile = fallback_similarity(&s);
        for k in 1..=20 {
            assert!(profile.scores[k].abs() < 0.1, "lag {k}: {}", profile.scores[k]);
        }
    }

    #[test]
    fn dynamic_threshold_relaxes_on_degenerate_scores() {
        let s = series((0..40).map(|i| i as f64).collect());
        let state = EngineState::with_defaults(&s).unwrap();
        let profile = SimilarityProfile { scores: vec![0.7; 30] };
        // Base = 0.7, nothing exceeds it, so the 90th percentile (= 0.7).
        assert_eq!(dynamic_threshold(&state, &profile), 0.7);
    }

    #[test]
    fn dynamic_threshold_uses_mean_plus_std() {
        let s = series((0..40).map(|i| i as f64).collect());
        let state = EngineState::with_defaults(&s).unwrap();
        let scores: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let profile = SimilarityProfile { scores };
        let expected = 49.5 + (9999.0f64 / 12.0).sqrt();
        assert!((dynamic_threshold(&state, &profile) - expected).abs() < 1e-9);
    }

    #[test]
    fn static_threshold_is_95th_percentile() {
        let s = series((0..40).map(|i| i as f64).collect());
        let mut state = EngineState::with_defaults(&s).unwrap();
        state.dynamic_threshold = false;
        let scores: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let profile = SimilarityProfile { scores: scores.clone() };
        assert_eq!(
            dynamic_threshold(&state, &profile),
            stats::percentile(&scores, 95.0)
        );
    }

    #[test]
    fn exact_repetition_scores_one_a_period_back() {
        // Two identical back-to-back patterns, cosine only, single level.
        let pattern: Vec<f64> = vec![0.0, 2.0, 1.0, 3.0, 0.5, 2.5, 1.5, 3.5];
        let mut values = pattern.clone();
        values.extend_from_slice(&pattern);
        let s = series(values);
        let config = EngineConfig {
            window_size: Some(pattern.len()),
            similarity_methods: vec![SimilarityMethod::Cosine],
            dynamic_window: false,
            multi_level: false,
            ..EngineConfig::default()
        };
        let mut state = EngineState::new(&s, config).unwrap();
        let profile = find_similar_segments(&mut state, &s);
        // Latest segment starts at index 8; the segment one period back is 0.
        assert!((profile.scores[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn dtw_skipped_beyond_500_segments() {
        let s = series((0..560).map(|i| (i as f64 * 0.31).sin()).collect());
        let base = EngineConfig {
            window_size: Some(10),
            dynamic_window: false,
            multi_level: false,
            ..EngineConfig::default()
        };
        let mut with_dtw = EngineState::new(
            &s,
            EngineConfig {
                similarity_methods: vec![SimilarityMethod::Cosine, SimilarityMethod::Dtw],
                ..base.clone()
            },
        )
        .unwrap();
        let mut cosine_only = EngineState::new(
            &s,
            EngineConfig {
                similarity_methods: vec![SimilarityMethod::Cosine],
                ..base
            },
        )
        .unwrap();
        let a = find_similar_segments(&mut with_dtw, &s);
        let b = find_similar_segments(&mut cosine_only, &s);
        assert_eq!(a, b);
    }

    #[test]
    fn similarity_path_forecast_starts_at_last_observation() {
        let s = sawtooth(20, 10);
        let mut state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 20,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let result = predict(&mut state, &s).unwrap();
        assert_eq!(result.provenance, Provenance::SimilarityPath);
        assert_eq!(result.values[0].to_bits(), s.last().to_bits());
    }

    #[test]
    fn periodic_recall_reproduces_next_period() {
        let period = 20usize;
        let s = sawtooth(period, 10);
        let mut state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: period,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let result = predict(&mut state, &s).unwrap();
        assert_eq!(result.provenance, Provenance::SimilarityPath);
        let last = s.last();
        for (j, &got) in result.values.iter().enumerate() {
            let pattern = (j % period) as f64 / period as f64;
            let expected = pattern + (last - 0.0);
            assert!(
                (got - expected).abs() < 1e-6,
                "step {j}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn predict_is_deterministic() {
        let s = sawtooth(15, 8);
        let run = || {
            let mut state = EngineState::new(
                &s,
                EngineConfig {
                    forecast_horizon: 10,
                    seed: 7,
                    ..EngineConfig::default()
                },
            )
            .unwrap();
            predict(&mut state, &s).unwrap()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn short_series_routes_to_fallback() {
        // The adjusted window (min 10) plus horizon cannot fit any
        // candidate future inside 8 points, so every path degrades to
        // the fallback.
        let s = series((0..8).map(|i| (i as f64).sin() + 2.0).collect());
        let mut state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 1,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let result = predict(&mut state, &s).unwrap();
        assert_eq!(result.provenance, Provenance::Fallback);
    }

    #[test]
    fn predict_updates_performance_buffers() {
        let s = sawtooth(10, 6);
        let mut state = EngineState::with_defaults(&s).unwrap();
        assert!(state.recent_errors().is_empty());
        predict(&mut state, &s).unwrap();
        assert_eq!(state.recent_errors().len(), 1);
        assert_eq!(state.recent_similarity_scores().len(), 1);
    }

    #[test]
    fn fallback_extends_a_pure_line() {
        // The moving-average trend lags a line by slope*(w-1)/2, which
        // lands in the residual mean, so the relative error floor is
        // that constant over the line's level.
        let n = 400usize;
        let s = series((0..n).map(|i| 0.5 * i as f64).collect());
        let state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 5,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let result = fallback_predict(&state, &s, 20, 1).unwrap();
        for (j, &got) in result.values.iter().enumerate() {
            let truth = 0.5 * (n + j) as f64;
            assert!(
                (got - truth).abs() <= 0.02 * truth,
                "step {j}: {got} vs {truth}"
            );
        }
    }

    #[test]
    fn fallback_detects_seasonal_period() {
        let s = series(
            (0..400)
                .map(|i| {
                    (2.0 * std::f64::consts::PI * i as f64 / 20.0).sin() + 0.01 * i as f64
                })
                .collect(),
        );
        let state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 5,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        // Same preprocessing as fallback_predict: detect periods on the
        // moving-average detrended data.
        let values = s.values();
        let w = adaptive_trend_window(values);
        let trend = moving_average(values, w);
        let detrended: Vec<f64> = values[w - 1..]
            .iter()
            .zip(&trend)
            .map(|(v, t)| v - t)
            .collect();
        let periods = detect_seasonal_periods(&detrended, 30.min(detrended.len() / 2).max(4), 2);
        assert!(
            periods.iter().any(|&p| (p as i64 - 20).abs() <= 1),
            "detected {periods:?}"
        );
        let _ = state;
    }

    #[test]
    fn fallback_bands_bracket_the_point_forecast_on_constant_data() {
        let s = series(vec![4.2; 80]);
        let state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 6,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let result = fallback_predict(&state, &s, 10, 1).unwrap();
        let lower = result.ci_lower.as_ref().unwrap();
        let upper = result.ci_upper.as_ref().unwrap();
        for j in 0..6 {
            assert!(lower[j] <= upper[j]);
            assert!((result.values[j] - 4.2).abs() < 0.2);
        }
    }

    #[test]
    fn fallback_rejects_insufficient_data() {
        let s = series((0..30).map(|i| i as f64).collect());
        let state = EngineState::with_defaults(&s).unwrap();
        assert!(matches!(
            fallback_predict(&state, &s, 20, 1),
            Err(Error::InsufficientData { .. })
        ));
    }

    #[test]
    fn tuner_returns_argmin_of_direct_comparison() {
        let s = series(
            (0..300)
                .map(|i| {
                    let t = i as f64;
                    (2.0 * std::f64::consts::PI * t / 8.0).sin() + 0.002 * t
                })
                .collect(),
        );
        let state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 8,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let chosen = tune_hyperparameters(&state, &s).unwrap();
        assert!((1..=4).contains(&chosen));

        // Independent MSE comparison over the same candidates.
        let values = s.values();
        let mut best = (1usize, f64::INFINITY);
        for ns in 1..=4 {
            let f = fallback_predict(&state, &s, 20, ns).unwrap();
            let k = f.values.len();
            let mse = mean_squared_error(&values[values.len() - k..], &f.values);
            if mse < best.1 {
                best = (ns, mse);
            }
        }
        assert_eq!(chosen, best.0);
    }

    #[test]
    fn moving_average_is_valid_mode() {
        let out = moving_average(&[1.0, 2.0, 3.0, 4.0], 2);
        assert_eq!(out, vec![1.5, 2.5, 3.5]);
    }

    #[test]
    fn tuner_prefers_one_season_for_a_single_sine() {
        let tau = 2.0 * std::f64::consts::PI;
        let mut rng = crate::rng::SeededRng::new(1);
        let s = series(
            (0..300)
                .map(|i| (tau * i as f64 / 8.0).sin() + 0.05 * rng.standard_normal())
                .collect(),
        );
        let state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 8,
                seed: 1,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert_eq!(tune_hyperparameters(&state, &s).unwrap(), 1);
    }

    #[test]
    fn tuner_prefers_two_seasons_for_superposed_sines() {
        let tau = 2.0 * std::f64::consts::PI;
        let mut rng = crate::rng::SeededRng::new(1);
        let s = series(
            (0..400)
                .map(|i| {
                    let t = i as f64;
                    (tau * t / 7.0).sin()
                        + 0.8 * (tau * t / 13.0).sin()
                        + 0.05 * rng.standard_normal()
                })
                .collect(),
        );
        let state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 8,
                seed: 1,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        assert_eq!(tune_hyperparameters(&state, &s).unwrap(), 2);
    }

    #[test]
    fn dynamic_threshold_never_exceeds_the_maximum_score() {
        let s = series((0..60).map(|i| i as f64).collect());
        let state = EngineState::with_defaults(&s).unwrap();
        let mut rng = crate::rng::SeededRng::new(19);
        for _ in 0..50 {
            let n = rng.integer_in(1, 40);
            let scores: Vec<f64> = (0..n).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let profile = SimilarityProfile { scores };
            assert!(dynamic_threshold(&state, &profile) <= max + 1e-12);
        }
    }
}
