//! Engine configuration and mutable state.

use std::collections::HashMap;

use crate::digest::ContentDigest;
use crate::error::{Error, Result};
use crate::segmentation::{self, SegmentMatrix};
use crate::series::TimeSeries;
use crate::similarity::{SimilarityMatrix, SimilarityMethod};

/// Most recent-performance entries retained per buffer.
pub const PERFORMANCE_BUFFER_CAP: usize = 100;

/// Construction-time options for an engine.
#[derive(Debug, Clone)]
pub struct EngineConfig {
    /// Segment length; defaults to max(10, len/10), clamped to len/2.
    pub window_size: Option<usize>,
    /// Steps ahead per prediction; clamped to max(1, len/10).
    pub forecast_horizon: usize,
    pub similarity_methods: Vec<SimilarityMethod>,
    pub dynamic_window: bool,
    pub multi_level: bool,
    pub dynamic_threshold: bool,
    pub seed: u64,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            window_size: None,
            forecast_horizon: 1,
            similarity_methods: vec![
                SimilarityMethod::Cosine,
                SimilarityMethod::Euclidean,
                SimilarityMethod::Dtw,
            ],
            dynamic_window: true,
            multi_level: true,
            dynamic_threshold: true,
            seed: 0,
        }
    }
}

/// Engine configuration plus mutable history: recent-performance buffers,
/// the similarity threshold, and digest-keyed caches.
///
/// Single-owner mutable: one instance must not be shared across threads;
/// distinct instances may run in parallel.
#[derive(Debug, Clone)]
pub struct EngineState {
    pub window_size: usize,
    pub forecast_horizon: usize,
    pub similarity_methods: Vec<SimilarityMethod>,
    pub dynamic_window: bool,
    pub multi_level: bool,
    pub dynamic_threshold: bool,
    pub seed: u64,
    pub threshold: f64,
    recent_errors: Vec<f64>,
    recent_similarity_scores: Vec<f64>,
    pub(crate) segment_cache: HashMap<ContentDigest, SegmentMatrix>,
    pub(crate) similarity_cache: HashMap<(ContentDigest, SimilarityMethod), SimilarityMatrix>,
}

impl EngineState {
    pub fn new(series: &TimeSeries, config: EngineConfig) -> Result<Self> {
        let len = series.len();
        if len < 2 {
            return Err(Error::TooShort { needed: 2, got: len });
        }
        let half = (len / 2).max(1);
        let window_size = match config.window_size {
            Some(w) => w.min(half),
            None => (len / 10).max(10).min(half),
        };
        let mut methods = Vec::new();
        for m in config.similarity_methods {
            if !methods.contains(&m) {
                methods.push(m);
            }
        }
        if methods.is_empty() {
            return Err(Error::InvalidInput("no similarity methods".into()));
        }
        let mut state = Self {
            window_size,
            forecast_horizon: config.forecast_horizon.min(len / 10).max(1),
            similarity_methods: methods,
            dynamic_window: config.dynamic_window,
            multi_level: config.multi_level,
            dynamic_threshold: config.dynamic_threshold,
            seed: config.seed,
            threshold: 0.5,
            recent_errors: Vec::new(),
            recent_similarity_scores: Vec::new(),
            segment_cache: HashMap::new(),
            similarity_cache: HashMap::new(),
        };
        if state.dynamic_window {
            state.window_size = segmentation::adaptive_window_size(series);
        }
        Ok(state)
    }

    pub fn with_defaults(series: &TimeSeries) -> Result<Self> {
        Self::new(series, EngineConfig::default())
    }

    /// Appends one (error, similarity) observation, keeping the most
    /// recent 100 entries of each buffer.
    pub fn record_performance(&mut self, error: f64, similarity: f64) {
        self.recent_errors.push(error);
        self.recent_similarity_scores.push(similarity);
        trim_front(&mut self.recent_errors, PERFORMANCE_BUFFER_CAP);
        trim_front(&mut self.recent_similarity_scores, PERFORMANCE_BUFFER_CAP);
    }

    pub fn recent_errors(&self) -> &[f64] {
        &self.recent_errors
    }

    pub fn recent_similarity_scores(&self) -> &[f64] {
        &self.recent_similarity_scores
    }

    pub fn clear_caches(&mut self) {
        self.segment_cache.clear();
        self.similarity_cache.clear();
    }
}

fn trim_front(buffer: &mut Vec<f64>, cap: usize) {
    if buffer.len() > cap {
        buffer.drain(..buffer.len() - cap);
    }
}
