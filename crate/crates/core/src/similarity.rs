//! Pairwise similarity kernels between segments, plus sample entropy and
//! direction-accuracy utilities.
//!
//! All kernels are pure functions. Degenerate segments (zero variance or
//! zero norm) make correlation-style measures undefined; those entries are
//! substituted: 1 when the two segments are element-wise equal, else 0,
//! which preserves the unit diagonal without poisoning thresholds with
//! NaN.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::segmentation::SegmentMatrix;
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SimilarityMethod {
    Cosine,
    Correlation,
    Euclidean,
    Spearman,
    Dtw,
    Direction,
}

impl SimilarityMethod {
    pub const ALL: [SimilarityMethod; 6] = [
        SimilarityMethod::Cosine,
        SimilarityMethod::Correlation,
        SimilarityMethod::Euclidean,
        SimilarityMethod::Spearman,
        SimilarityMethod::Dtw,
        SimilarityMethod::Direction,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SimilarityMethod::Cosine => "cosine",
            SimilarityMethod::Correlation => "correlation",
            SimilarityMethod::Euclidean => "euclidean",
            SimilarityMethod::Spearman => "spearman",
            SimilarityMethod::Dtw => "dtw",
            SimilarityMethod::Direction => "direction",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.trim().to_ascii_lowercase().as_str() {
            "cosine" => Ok(SimilarityMethod::Cosine),
            "correlation" => Ok(SimilarityMethod::Correlation),
            "euclidean" => Ok(SimilarityMethod::Euclidean),
            "spearman" => Ok(SimilarityMethod::Spearman),
            "dtw" => Ok(SimilarityMethod::Dtw),
            "direction" => Ok(SimilarityMethod::Direction),
            other => Err(Error::InvalidInput(format!(
                "unknown similarity method {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for SimilarityMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Symmetric n-by-n similarity matrix for one method.
#[derive(Debug, Clone)]
pub struct SimilarityMatrix {
    n: usize,
    entries: Vec<f64>,
    method: SimilarityMethod,
}

impl SimilarityMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn method(&self) -> SimilarityMethod {
        self.method
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    /// Similarities of the latest segment (last row) to every earlier
    /// segment, i.e. row n-1 without the diagonal entry.
    pub fn last_row_historical(&self) -> Vec<f64> {
        let last = self.n - 1;
        (0..last).map(|j| self.get(last, j)).collect()
    }
}

/// Dynamic time warping cost with absolute point differences, full
/// matrix, no warping band.
pub fn dtw_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(dtw_cost(a, b, |x, y| (x - y).abs()))
}

/// Squared-cost DTW under a square root: the evaluation-metric variant.
pub fn dtw_distance_squared_cost(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    Ok(dtw_cost(a, b, |x, y| (x - y) * (x - y)).sqrt())
}

fn dtw_cost(a: &[f64], b: &[f64], point_cost: impl Fn(f64, f64) -> f64) -> f64 {
    let m = b.len();
    let mut prev = vec![f64::INFINITY; m + 1];
    let mut curr = vec![f64::INFINITY; m + 1];
    prev[0] = 0.0;
    for &x in a {
        curr[0] = f64::INFINITY;
        for (j, &y) in b.iter().enumerate() {
            let cost = point_cost(x, y);
            curr[j + 1] = cost + prev[j + 1].min(curr[j]).min(prev[j]);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[m]
}

/// Computes the n-by-n similarity matrix for one method over the segment
/// rows. Requires at least two segments of length at least two.
pub fn pairwise_similarity(
    segments: &SegmentMatrix,
    method: SimilarityMethod,
) -> Result<SimilarityMatrix> {
    let n = segments.n_segments();
    if n < 2 {
        return Err(Error::TooShort { needed: 2, got: n });
    }
    if segments.window_size() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: segments.window_size(),
        });
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let value = pair_entry(segments.row(i), segments.row(j), method);
            entries[i * n + j] = value;
            entries[j * n + i] = value;
        }
    }
    Ok(SimilarityMatrix { n, entries, method })
}

/// Similarity for one unordered pair under one method. This is the
/// scalar kernel used both by the pairwise matrices and by per-segment
/// explainability scores.
pub fn pair_entry(a: &[f64], b: &[f64], method: SimilarityMethod) -> f64 {
    match method {
        SimilarityMethod::Cosine => {
            let norm_a = a.iter().map(|x| x * x).sum::<f64>().sqrt();
            let norm_b = b.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm_a == 0.0 || norm_b == 0.0 {
                return degenerate_entry(a, b);
            }
            let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
            dot / (norm_a * norm_b)
        }
        SimilarityMethod::Correlation => {
            let value = stats::pearson(a, b);
            if value.is_nan() {
                degenerate_entry(a, b)
            } else {
                value
            }
        }
        SimilarityMethod::Euclidean => {
            let dist = a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            1.0 / (1.0 + dist)
        }
        SimilarityMethod::Spearman => {
            let value = stats::spearman(a, b);
            if value.is_nan() {
                degenerate_entry(a, b)
            } else {
                value
            }
        }
        SimilarityMethod::Dtw => {
            let dist = dtw_cost(a, b, |x, y| (x - y).abs());
            1.0 / (1.0 + dist)
        }
        SimilarityMethod::Direction => {
            direction_accuracy(a, b).unwrap_or(f64::NAN)
        }
    }
}

fn degenerate_entry(a: &[f64], b: &[f64]) -> f64 {
    if a == b {
        1.0
    } else {
        0.0
    }
}

/// Softened DTW similarity: each raw `1/(1+dtw)` score `s` is remapped to
/// `1/(1+sqrt(s))`. Exposed as a standalone utility; the predict pipeline
/// never calls it.
pub fn adjusted_dtw_similarity(segments: &SegmentMatrix) -> Result<SimilarityMatrix> {
    let raw = pairwise_similarity(segments, SimilarityMethod::Dtw)?;
    let entries = raw
        .entries
        .iter()
        .map(|s| 1.0 / (1.0 + s.sqrt()))
        .collect();
    Ok(SimilarityMatrix {
        n: raw.n,
        entries,
        method: SimilarityMethod::Dtw,
    })
}

/// Parameters for [`sample_entropy`]: template length `m` and absolute
/// tolerance `r`. The tolerance is deliberately NOT scaled by the series
/// standard deviation.
#[derive(Debug, Clone, Copy)]
pub struct EntropyParams {
    pub m: usize,
    pub r: f64,
}

impl Default for EntropyParams {
    fn default() -> Self {
        Self { m: 2, r: 0.2 }
    }
}

/// Sample entropy: -log((A + 1e-10) / (B + 1e-10)) where B counts
/// template pairs of length m within tolerance and A those still within
/// tolerance at length m+1. Pairs are counted once (j > i), no
/// self-matches.
pub fn sample_entropy(x: &[f64], params: EntropyParams) -> Result<f64> {
    if params.m < 1 || params.r <= 0.0 {
        return Err(Error::InvalidInput("require m >= 1 and r > 0".into()));
    }
    let n = x.len();
    let m = params.m;
    if n <= m + 1 {
        return Err(Error::TooShort {
            needed: m + 2,
            got: n,
        });
    }
    let mut a = 0.0f64;
    let mut b = 0.0f64;
    for i in 0..n - m {
        for j in i + 1..n - m {
            let template_match = (0..m).all(|k| (x[i + k] - x[j + k]).abs() <= params.r);
            if template_match {
                b += 1.0;
                if (x[i + m] - x[j + m]).abs() <= params.r {
                    a += 1.0;
                }
            }
        }
    }
    Ok(-(((a + 1e-10) / (b + 1e-10)).ln()))
}

fn num_sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Fraction of steps whose directions match. A zero step is its own
/// direction class: two simultaneous zero-steps match.
pub fn direction_accuracy(s1: &[f64], s2: &[f64]) -> Result<f64> {
    if s1.len() != s2.len() {
        return Err(Error::LengthMismatch {
            left: s1.len(),
            right: s2.len(),
        });
    }
    if s1.len() < 2 {
        return Err(Error::TooShort {
            needed: 2,
            got: s1.len(),
        });
    }
    let steps = s1.len() - 1;
    let matches = (0..steps)
        .filter(|&i| num_sign(s1[i + 1] - s1[i]) == num_sign(s2[i + 1] - s2[i]))
        .count();
    Ok(matches as f64 / steps as f64)
}
