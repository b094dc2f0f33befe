//! Segment extraction with per-segment normalization, adaptive window
//! sizing, and per-prediction dynamic parameter adjustment.

use crate::diagnostics;
use crate::digest::ContentDigest;
use crate::engine::EngineState;
use crate::error::{Error, Result};
use crate::series::TimeSeries;
use crate::stats;

/// Overlapping, per-segment-normalized windows of a series. Row `i`
/// starts at source index `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct SegmentMatrix {
    data: Vec<f64>,
    n_segments: usize,
    window_size: usize,
    source_length: usize,
}

impl SegmentMatrix {
    /// Builds a matrix from explicit rows (no normalization applied).
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::EmptyInput);
        }
        let window_size = rows[0].len();
        if window_size == 0 {
            return Err(Error::EmptyInput);
        }
        if rows.iter().any(|r| r.len() != window_size) {
            return Err(Error::InvalidInput("ragged segment rows".into()));
        }
        let n_segments = rows.len();
        let source_length = n_segments + window_size - 1;
        Ok(Self {
            data: rows.into_iter().flatten().collect(),
            n_segments,
            window_size,
            source_length,
        })
    }

    pub fn n_segments(&self) -> usize {
        self.n_segments
    }

    pub fn window_size(&self) -> usize {
        self.window_size
    }

    pub fn source_length(&self) -> usize {
        self.source_length
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.window_size..(i + 1) * self.window_size]
    }

    pub fn last_row(&self) -> &[f64] {
        self.row(self.n_segments - 1)
    }

    /// Content digest of the raw matrix bytes; the cache key.
    pub fn digest(&self) -> ContentDigest {
        ContentDigest::of_values(&self.data)
    }
}

/// Extracts overlapping stride-1 windows, each normalized to
/// `(x - mean) / (std + 1e-8)`. If the series is shorter than the window,
/// the window shrinks to half the data length first.
pub fn extract_segments(series: &TimeSeries, window_size: usize) -> Result<SegmentMatrix> {
    let values = series.values();
    let len = values.len();
    if len < 2 {
        return Err(Error::TooShort { needed: 2, got: len });
    }
    let effective = if len < window_size { len / 2 } else { window_size };
    let effective = effective.max(1);
    let n_segments = len - effective + 1;
    let mut data = Vec::with_capacity(n_segments * effective);
    for start in 0..n_segments {
        let window = &values[start..start + effective];
        let mean = stats::mean(window);
        let std = stats::std_dev(window);
        data.extend(window.iter().map(|x| (x - mean) / (std + 1e-8)));
    }
    Ok(SegmentMatrix {
        data,
        n_segments,
        window_size: effective,
        source_length: len,
    })
}

/// Window size from data length, variability, and detected seasonality.
/// Result lies in [2, len/8] (the lower clamp wins for very short data).
pub fn adaptive_window_size(series: &TimeSeries) -> usize {
    let values = series.values();
    let len = values.len();
    let base_window = if len < 100 {
        (len / 20).max(2)
    } else if len < 1000 {
        (len / 40).max(5)
    } else {
        (len / 80).max(25)
    };
    let seasons = if len >= 4 {
        diagnostics::detect_seasonality(series, None).unwrap_or_default()
    } else {
        Vec::new()
    };
    let variability = stats::std_dev(values) / (stats::mean(values) + 1e-8);
    let window = if let Some(&max_season) = seasons.iter().max() {
        max_season.min(base_window) as i64
    } else {
        (base_window as f64 * (1.0 + variability)) as i64
    };
    let upper = (len / 8).max(2) as i64;
    window.clamp(2, upper) as usize
}

/// Updates `window_size` and `threshold` in place from trailing
/// volatility and the recent-performance buffers.
///
/// The volatility scale uses the raw standard deviation (unit-sensitive
/// on purpose), and the resulting window always lands on len/2 for
/// len >= 20 because the scale is clipped to at most 1. NaN entries in
/// the performance buffers are dropped before averaging; with no history
/// at all the threshold defaults to 0.5.
pub fn adjust_dynamic_parameters(state: &mut EngineState, series: &TimeSeries) {
    let values = series.values();
    let len = values.len();
    let min_window = 10usize;
    let max_window = len / 2;
    let baseline = (len / 10).max(10);
    let volatility = if len > baseline {
        stats::std_dev(&values[len - baseline..])
    } else {
        stats::std_dev(values)
    };
    let scale = volatility.clamp(0.1, 1.0);
    let window = (max_window as f64 / scale) as i64;
    state.window_size = (window.min(max_window as i64)).max(min_window as i64) as usize;

    let errors: Vec<f64> = state
        .recent_errors()
        .iter()
        .copied()
        .filter(|e| !e.is_nan())
        .collect();
    let threshold_adjustment = if errors.is_empty() {
        0.0
    } else {
        stats::mean(&errors) + stats::std_dev(&errors)
    };
    let sims: Vec<f64> = state
        .recent_similarity_scores()
        .iter()
        .copied()
        .filter(|s| !s.is_nan())
        .collect();
    state.threshold = if sims.is_empty() {
        0.5
    } else {
        stats::mean(&sims) + stats::std_dev(&sims) + threshold_adjustment
    };
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::EngineState;
    use crate::rng::SeededRng;

    fn series(values: Vec<f64>) -> TimeSeries {
        TimeSeries::new(values).unwrap()
    }

    #[test]
    fn segment_count_is_len_minus_window_plus_one() {
        let m = extract_segments(&series(vec![1.0, 2.0, 3.0, 4.0]), 2).unwrap();
        assert_eq!(m.n_segments(), 3);
        assert_eq!(m.window_size(), 2);
        // [1, 2] normalized: mean 1.5, std 0.5.
        assert!((m.row(0)[0] + 1.0).abs() < 1e-7);
        assert!((m.row(0)[1] - 1.0).abs() < 1e-7);
    }

    #[test]
    fn constant_window_normalizes_to_zeros() {
        let m = extract_segments(&series(vec![5.0, 5.0, 5.0]), 3).unwrap();
        assert_eq!(m.n_segments(), 1);
        assert!(m.row(0).iter().all(|&x| x == 0.0));
    }

    #[test]
    fn oversized_window_shrinks_to_half_length() {
        let m = extract_segments(&series((1..=6).map(f64::from).collect()), 10).unwrap();
        assert_eq!(m.window_size(), 3);
        assert_eq!(m.n_segments(), 4);
    }

    #[test]
    fn rows_are_normalized() {
        let mut rng = SeededRng::new(2);
        let values: Vec<f64> = (0..120).map(|_| rng.uniform_in(-10.0, 10.0)).collect();
        let m = extract_segments(&series(values), 12).unwrap();
        for i in 0..m.n_segments() {
            let row = m.row(i);
            assert!(stats::mean(row).abs() < 1e-9);
            assert!((stats::std_dev(row) - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn normalization_is_idempotent_within_tolerance() {
        let mut rng = SeededRng::new(4);
        let values: Vec<f64> = (0..40).map(|_| rng.uniform_in(0.0, 3.0)).collect();
        let m = extract_segments(&series(values), 8).unwrap();
        for i in 0..m.n_segments() {
            let row = m.row(i).to_vec();
            let again = extract_segments(&series(row.clone()), row.len()).unwrap();
            for (a, b) in row.iter().zip(again.row(0)) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn adaptive_window_tier_arithmetic() {
        // Constant positive data: no seasonality, zero variability.
        let s = series(vec![3.0; 80]);
        assert_eq!(adaptive_window_size(&s), 4); // max(2, 80/20)

        let s = series(vec![3.0; 2000]);
        assert_eq!(adaptive_window_size(&s), 25); // max(25, 2000/80)
    }

    #[test]
    fn adaptive_window_respects_clamp() {
        let mut rng = SeededRng::new(8);
        for len in [2usize, 5, 17, 64, 130, 900, 2400] {
            let values: Vec<f64> = (0..len).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
            let w = adaptive_window_size(&series(values));
            assert!(w >= 2);
            assert!(w <= (len / 8).max(2), "len={len} w={w}");
        }
    }

    #[test]
    fn adaptive_window_monotone_in_length_for_same_shape() {
        let gen = |n: usize| {
            series(
                (0..n)
                    .map(|i| (2.0 * std::f64::consts::PI * i as f64 / 25.0).sin() + 2.0)
                    .collect(),
            )
        };
        let mut prev = 0;
        for n in (50..=800).step_by(50) {
            let w = adaptive_window_size(&gen(n));
            assert!(w >= prev, "n={n}: {w} < {prev}");
            prev = w;
        }
    }

    #[test]
    fn adjust_defaults_threshold_without_history() {
        let s = series((0..100).map(|i| (i as f64 * 0.7).sin()).collect());
        let mut state = EngineState::with_defaults(&s).unwrap();
        adjust_dynamic_parameters(&mut state, &s);
        assert_eq!(state.threshold, 0.5);
        // Scale is clipped to at most 1, so the window lands on len/2.
        assert_eq!(state.window_size, 50);
    }

    #[test]
    fn adjust_window_clamp_chain() {
        // Low volatility (constant data): scale clips to 0.1, window
        // 10 * (len/2) clamps back to len/2.
        let s = series(vec![1.0; 100]);
        let mut state = EngineState::with_defaults(&s).unwrap();
        adjust_dynamic_parameters(&mut state, &s);
        assert_eq!(state.window_size, 50);

        // Short data: the min-10 floor wins over len/2.
        let short = series(vec![1.0, 5.0, 2.0, 4.0, 3.0, 1.5, 2.5, 0.5]);
        let mut state = EngineState::with_defaults(&short).unwrap();
        adjust_dynamic_parameters(&mut state, &short);
        assert_eq!(state.window_size, 10);
    }

    #[test]
    fn adjust_bounds_hold_for_long_series() {
        let mut rng = SeededRng::new(13);
        for len in [20usize, 21, 50, 99, 333] {
            let values: Vec<f64> = (0..len).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
            let s = series(values);
            let mut state = EngineState::with_defaults(&s).unwrap();
            adjust_dynamic_parameters(&mut state, &s);
            assert!(state.window_size >= 10);
            assert!(state.window_size <= (len / 2).max(10));
        }
    }

    #[test]
    fn adjust_drops_nan_history() {
        let s = series((0..60).map(|i| i as f64).collect());
        let mut state = EngineState::with_defaults(&s).unwrap();
        state.record_performance(f64::NAN, 0.5);
        state.record_performance(2.0, f64::NAN);
        state.record_performance(4.0, 0.5);
        adjust_dynamic_parameters(&mut state, &s);
        // errors [2, 4]: mean 3, std 1 -> adjustment 4; sims [0.5, 0.5]:
        // mean 0.5, std 0 -> threshold 4.5.
        assert!((state.threshold - 4.5).abs() < 1e-12);
    }

    #[test]
    fn too_short_to_segment() {
        assert!(extract_segments(&series(vec![1.0]), 1).is_err());
    }
}
