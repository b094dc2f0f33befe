//! Seasonality detection, anomaly detection, nearest-neighbor retrieval,
//! and explainability reports.

use serde::Serialize;

use crate::engine::EngineState;
use crate::error::{Error, Result};
use crate::forecaster::{dynamic_threshold, find_similar_segments};
use crate::segmentation::extract_segments;
use crate::series::TimeSeries;
use crate::similarity::{pair_entry, SimilarityMethod};
use crate::stats;

/// A flagged segment: `[start_index, end_index)` in source coordinates.
#[derive(Debug, Clone, Serialize)]
pub struct AnomalyRecord {
    pub start_index: usize,
    pub end_index: usize,
    pub segment: Vec<f64>,
    pub similarity_score: f64,
}

/// One contributing segment of an explainability report.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentContribution {
    pub segment_index: usize,
    pub similarity_score: f64,
    /// The segment's raw future values.
    pub prediction: Vec<f64>,
    /// Normalized-weight share of the combined prediction per step.
    pub weighted_contribution: Vec<f64>,
    /// Per-step percentage of the combined prediction; sums to 100
    /// across contributors at every step.
    pub contribution_percentage: Vec<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExplainabilityReport {
    pub top_similar_segments: Vec<usize>,
    pub similarity_scores: Vec<f64>,
    pub threshold: f64,
    pub segment_contributions: Vec<SegmentContribution>,
}

/// Per-method similarity of one historical segment to the latest one,
/// with element-wise contribution analysis.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentAnalysis {
    pub segment_index: usize,
    pub similarity_scores: Vec<(SimilarityMethod, f64)>,
    /// Absolute element-wise differences between the two segments.
    pub feature_contributions: Vec<f64>,
    /// Indices of the five largest contributions, descending.
    pub top_contributing_features: Vec<usize>,
}

/// Finds the primary seasonal period as the first interior peak of the
/// raw autocorrelation, up to `max_lag` (default len/2). Returns an empty
/// list when no peak exists (monotone or constant data).
pub fn detect_seasonality(series: &TimeSeries, max_lag: Option<usize>) -> Result<Vec<usize>> {
    let values = series.values();
    let n = values.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    if stats::std_dev(values) == 0.0 {
        return Ok(Vec::new());
    }
    let max_lag = max_lag.unwrap_or(n / 2).min(n - 1);
    let acf: Vec<f64> = (0..=max_lag)
        .map(|lag| (0..n - lag).map(|t| values[t] * values[t + lag]).sum::<f64>())
        .collect();
    for k in 1..max_lag {
        if acf[k] > acf[k - 1] && acf[k] > acf[k + 1] {
            return Ok(vec![k]);
        }
    }
    Ok(Vec::new())
}

/// Flags segments whose similarity to the latest segment falls strictly
/// below the given percentile of all scores. Returns the records (sorted
/// by start index) and the threshold that produced them.
pub fn detect_anomalies(
    state: &mut EngineState,
    series: &TimeSeries,
    threshold_percentile: f64,
) -> Result<(Vec<AnomalyRecord>, f64)> {
    let profile = find_similar_segments(state, series);
    if profile.is_empty() {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    let threshold = stats::percentile(&profile.scores, threshold_percentile);
    let values = series.values();
    let window = state.window_size;
    let mut anomalies = Vec::new();
    for (idx, &score) in profile.scores.iter().enumerate() {
        if score < threshold {
            let end = (idx + window).min(values.len());
            anomalies.push(AnomalyRecord {
                start_index: idx,
                end_index: end,
                segment: values[idx..end].to_vec(),
                similarity_score: score,
            });
        }
    }
    Ok((anomalies, threshold))
}

/// The k historical segments most similar to the latest segment,
/// descending by score; ties break toward the smaller index.
pub fn nearest_neighbors(
    state: &mut EngineState,
    series: &TimeSeries,
    k: usize,
) -> Result<Vec<(usize, f64)>> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be at least 1".into()));
    }
    let profile = find_similar_segments(state, series);
    if profile.is_empty() {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    Ok(top_k_descending(&profile.scores, k))
}

pub(crate) fn top_k_descending(scores: &[f64], k: usize) -> Vec<(usize, f64)> {
    let mut indexed: Vec<(usize, f64)> = scores.iter().copied().enumerate().collect();
    indexed.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    indexed.truncate(k);
    indexed
}

/// Compares the indexed segment with the latest segment under every
/// configured method and ranks the element positions by absolute
/// difference.
pub fn analyze_segment_similarity(
    state: &EngineState,
    series: &TimeSeries,
    segment_index: usize,
) -> Result<SegmentAnalysis> {
    let segments = extract_segments(series, state.window_size)?;
    let n = segments.n_segments();
    if segment_index >= n {
        return Err(Error::IndexOutOfRange {
            index: segment_index,
            len: n,
        });
    }
    let current = segments.last_row();
    let historical = segments.row(segment_index);
    let similarity_scores = state
        .similarity_methods
        .iter()
        .map(|&m| (m, pair_entry(current, historical, m)))
        .collect();
    let feature_contributions: Vec<f64> = current
        .iter()
        .zip(historical)
        .map(|(a, b)| (a - b).abs())
        .collect();
    let top_contributing_features = top_k_descending(&feature_contributions, 5)
        .into_iter()
        .map(|(i, _)| i)
        .collect();
    Ok(SegmentAnalysis {
        segment_index,
        similarity_scores,
        feature_contributions,
        top_contributing_features,
    })
}

/// Explains a prediction: which segments exceeded the dynamic threshold
/// (or the top k when none did), their future values, and each one's
/// weighted share of the combined forecast.
pub fn explainability_report(
    state: &mut EngineState,
    series: &TimeSeries,
    top_k: usize,
) -> Result<ExplainabilityReport> {
    let profile = find_similar_segments(state, series);
    if profile.is_empty() {
        return Err(Error::TooShort {
            needed: 2,
            got: series.len(),
        });
    }
    let threshold = dynamic_threshold(state, &profile);
    let scores = &profile.scores;
    let mut top: Vec<usize> = (0..scores.len()).filter(|&i| scores[i] > threshold).collect();
    if top.is_empty() {
        top = top_k_descending(scores, top_k).into_iter().map(|(i, _)| i).collect();
    }

    let values = series.values();
    let window = state.window_size;
    let horizon = state.forecast_horizon;
    let mut entries: Vec<(usize, f64, Vec<f64>)> = Vec::new();
    for &idx in &top {
        let start = idx + window;
        if start + horizon <= values.len() {
            entries.push((idx, scores[idx], values[start..start + horizon].to_vec()));
        }
    }
    if entries.is_empty() {
        return Err(Error::NoValidCandidates);
    }
    Ok(ExplainabilityReport {
        top_similar_segments: top.clone(),
        similarity_scores: top.iter().map(|&i| scores[i]).collect(),
        threshold,
        segment_contributions: segment_contributions(&entries),
    })
}

/// Builds the weighted contribution records for (index, score, future)
/// candidates. Weights are the scores normalized to sum to one, so the
/// contributions sum to the combined prediction and the percentages sum
/// to 100 at every step.
pub(crate) fn segment_contributions(
    entries: &[(usize, f64, Vec<f64>)],
) -> Vec<SegmentContribution> {
    let weight_sum: f64 = entries.iter().map(|(_, w, _)| w).sum();
    let horizon = entries.first().map_or(0, |(_, _, f)| f.len());
    let mut step_totals = vec![0.0; horizon];
    let weighted: Vec<Vec<f64>> = entries
        .iter()
        .map(|(_, weight, future)| {
            let share = weight / weight_sum;
            future
                .iter()
                .enumerate()
                .map(|(j, v)| {
                    let c = share * v;
                    step_totals[j] += c;
                    c
                })
                .collect()
        })
        .collect();
    entries
        .iter()
        .zip(weighted)
        .map(|((idx, score, future), contribution)| {
            let percentage = contribution
                .iter()
                .zip(&step_totals)
                .map(|(c, total)| c / total * 100.0)
                .collect();
            SegmentContribution {
                segment_index: *idx,
                similarity_score: *score,
                prediction: future.clone(),
                weighted_contribution: contribution,
                contribution_percentage: percentage,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineConfig;
    use crate::rng::SeededRng;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values).unwrap()
    }

    fn sine(n: usize, period: f64) -> Vec<f64> {
        (0..n)
            .map(|i| (2.0 * std::f64::consts::PI * i as f64 / period).sin())
            .collect()
    }

    #[test]
    fn seasonality_finds_sine_period() {
        let s = series(sine(200, 20.0));
        let periods = detect_seasonality(&s, None).unwrap();
        assert_eq!(periods.len(), 1);
        assert!((periods[0] as i64 - 20).abs() <= 1, "got {periods:?}");
    }

    #[test]
    fn monotone_ramp_has_no_peak() {
        let values: Vec<f64> = (0..100).map(|i| i as f64).collect();
        // Oracle: the raw ACF of the ramp is strictly decreasing, so no
        // interior peak can exist.
        let n = values.len();
        let acf: Vec<f64> = (0..=n / 2)
            .map(|lag| (0..n - lag).map(|t| values[t] * values[t + lag]).sum::<f64>())
            .collect();
        assert!(acf.windows(2).all(|w| w[1] < w[0]));
        assert!(detect_seasonality(&series(values), None).unwrap().is_empty());
    }

    #[test]
    fn constant_series_has_no_seasonality() {
        assert!(detect_seasonality(&series(vec![2.0; 50]), None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn seasonality_requires_four_points() {
        assert!(detect_seasonality(&series(vec![1.0, 2.0, 3.0]), None).is_err());
    }

    #[test]
    fn anomaly_flags_reproduce_from_returned_threshold() {
        // A monotone sine arc (pre-plateau): no window is the anti-phase
        // negation of another. (On a multi-period sine the anti-phase
        // windows score cosine -1 and own the bottom percentile,
        // drowning out any spike.)
        let mut rng = SeededRng::new(17);
        let mut values: Vec<f64> = (0..400).map(|i| (0.8 * i as f64 / 400.0).sin()).collect();
        for v in values.iter_mut() {
            *v += 0.002 * rng.standard_normal();
        }
        let sigma = crate::stats::std_dev(&values);
        values[200] += 10.0 * sigma;
        let s = series(values);
        let mut state = EngineState::new(
            &s,
            EngineConfig {
                window_size: Some(15),
                dynamic_window: false,
                multi_level: false,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let (anomalies, threshold) = detect_anomalies(&mut state, &s, 2.0).unwrap();
        assert!(!anomalies.is_empty());
        assert!(anomalies.iter().any(|a| a.start_index <= 200 && 200 < a.end_index));
        assert!(anomalies.windows(2).all(|w| w[0].start_index < w[1].start_index));
        // Recompute with the returned threshold: the flag set must match.
        let profile = find_similar_segments(&mut state, &s);
        let expected: Vec<usize> = (0..profile.scores.len())
            .filter(|&i| profile.scores[i] < threshold)
            .collect();
        let got: Vec<usize> = anomalies.iter().map(|a| a.start_index).collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn constant_data_yields_no_anomalies() {
        let s = series(vec![1.0; 120]);
        let mut state = EngineState::with_defaults(&s).unwrap();
        let (anomalies, _) = detect_anomalies(&mut state, &s, 2.0).unwrap();
        assert!(anomalies.is_empty());
    }

    #[test]
    fn percentile_zero_flags_nothing() {
        let s = series(sine(200, 25.0));
        let mut state = EngineState::with_defaults(&s).unwrap();
        let (anomalies, _) = detect_anomalies(&mut state, &s, 0.0).unwrap();
        assert!(anomalies.len() <= 1);
    }

    #[test]
    fn top_k_sorts_descending_with_index_ties() {
        assert_eq!(
            top_k_descending(&[0.2, 0.9, 0.5], 2),
            vec![(1, 0.9), (2, 0.5)]
        );
        assert_eq!(
            top_k_descending(&[0.5, 0.5], 2),
            vec![(0, 0.5), (1, 0.5)]
        );
        // k beyond the available entries returns everything.
        assert_eq!(top_k_descending(&[0.3], 5).len(), 1);
    }

    #[test]
    fn nearest_neighbor_of_exact_repetition() {
        let pattern = vec![0.0, 1.0, 0.5, 2.0, 1.5, 0.25, 1.75, 0.75];
        let mut values = pattern.clone();
        values.extend_from_slice(&pattern);
        let s = series(values);
        let mut state = EngineState::new(
            &s,
            EngineConfig {
                window_size: Some(pattern.len()),
                similarity_methods: vec![SimilarityMethod::Cosine],
                dynamic_window: false,
                multi_level: false,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let neighbors = nearest_neighbors(&mut state, &s, 1).unwrap();
        assert_eq!(neighbors[0].0, 0);
        assert!((neighbors[0].1 - 1.0).abs() < 1e-9);
    }

    #[test]
    fn neighbor_scores_match_independent_sort() {
        let s = series(sine(160, 16.0));
        let mut state = EngineState::with_defaults(&s).unwrap();
        let neighbors = nearest_neighbors(&mut state, &s, 5).unwrap();
        let profile = find_similar_segments(&mut state, &s);
        let mut full: Vec<(usize, f64)> = profile.scores.iter().copied().enumerate().collect();
        full.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
        assert_eq!(neighbors, full[..5].to_vec());
        assert!(neighbors.windows(2).all(|w| w[0].1 >= w[1].1));
    }

    #[test]
    fn self_analysis_is_perfect() {
        let s = series(sine(80, 10.0));
        let state = EngineState::with_defaults(&s).unwrap();
        let segments = extract_segments(&s, state.window_size).unwrap();
        let last = segments.n_segments() - 1;
        let analysis = analyze_segment_similarity(&state, &s, last).unwrap();
        for (method, score) in &analysis.similarity_scores {
            assert!((score - 1.0).abs() < 1e-9, "{method}: {score}");
        }
        assert!(analysis.feature_contributions.iter().all(|&c| c == 0.0));
    }

    #[test]
    fn contribution_ranking_matches_sort_oracle() {
        let contributions = [0.1, 0.9, 0.0, 0.5, 0.3, 0.2];
        let top: Vec<usize> = top_k_descending(&contributions, 5)
            .into_iter()
            .map(|(i, _)| i)
            .collect();
        assert_eq!(top, vec![1, 3, 4, 5, 0]);
    }

    #[test]
    fn euclidean_analysis_score_matches_formula() {
        let s = series(sine(80, 10.0));
        let state = EngineState::with_defaults(&s).unwrap();
        let analysis = analyze_segment_similarity(&state, &s, 0).unwrap();
        let segments = extract_segments(&s, state.window_size).unwrap();
        let dist: f64 = segments
            .last_row()
            .iter()
            .zip(segments.row(0))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let expected = 1.0 / (1.0 + dist);
        let got = analysis
            .similarity_scores
            .iter()
            .find(|(m, _)| *m == SimilarityMethod::Euclidean)
            .unwrap()
            .1;
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn analysis_rejects_out_of_range_index() {
        let s = series(sine(60, 10.0));
        let state = EngineState::with_defaults(&s).unwrap();
        assert!(matches!(
            analyze_segment_similarity(&state, &s, 10_000),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn single_contributor_owns_the_whole_prediction() {
        let entries = vec![(3usize, 0.8, vec![2.0, 4.0, 6.0])];
        let contributions = segment_contributions(&entries);
        assert_eq!(contributions.len(), 1);
        for (j, pct) in contributions[0].contribution_percentage.iter().enumerate() {
            assert!((pct - 100.0).abs() < 1e-9, "step {j}");
        }
        assert_eq!(contributions[0].weighted_contribution, vec![2.0, 4.0, 6.0]);
    }

    #[test]
    fn equal_candidates_average_their_futures() {
        let f = vec![1.0, 3.0];
        let g = vec![5.0, 1.0];
        let entries = vec![(0usize, 0.6, f.clone()), (4usize, 0.6, g.clone())];
        let contributions = segment_contributions(&entries);
        for j in 0..2 {
            let total: f64 = contributions.iter().map(|c| c.weighted_contribution[j]).sum();
            assert!((total - (f[j] + g[j]) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn three_candidate_contributions_match_hand_computation() {
        let entries = vec![
            (0usize, 0.5, vec![2.0]),
            (1usize, 0.3, vec![4.0]),
            (2usize, 0.2, vec![10.0]),
        ];
        let contributions = segment_contributions(&entries);
        // Normalized weights are exactly the scores (they sum to 1).
        assert!((contributions[0].weighted_contribution[0] - 1.0).abs() < 1e-12);
        assert!((contributions[1].weighted_contribution[0] - 1.2).abs() < 1e-12);
        assert!((contributions[2].weighted_contribution[0] - 2.0).abs() < 1e-12);
        let total = 1.0 + 1.2 + 2.0;
        assert!((contributions[0].contribution_percentage[0] - 100.0 / total).abs() < 1e-9);
        let pct_sum: f64 = contributions.iter().map(|c| c.contribution_percentage[0]).sum();
        assert!((pct_sum - 100.0).abs() < 1e-6);
    }

    #[test]
    fn explainability_percentages_sum_to_100() {
        let s = series(sine(240, 20.0).iter().map(|v| v + 3.0).collect());
        let mut state = EngineState::new(
            &s,
            EngineConfig {
                forecast_horizon: 5,
                ..EngineConfig::default()
            },
        )
        .unwrap();
        let report = explainability_report(&mut state, &s, 5).unwrap();
        assert!(!report.segment_contributions.is_empty());
        for j in 0..5 {
            let sum: f64 = report
                .segment_contributions
                .iter()
                .map(|c| c.contribution_percentage[j])
                .sum();
            assert!((sum - 100.0).abs() < 1e-6, "step {j}: {sum}");
        }
    }
}
