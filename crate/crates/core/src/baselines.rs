//! Lightweight reference forecasters for the benchmark harness.
//!
//! Update equations are the standard textbook forms, fixed here so
//! benchmark results are reproducible.

use crate::diagnostics::detect_seasonality;
use crate::error::{Error, Result};
use crate::forecaster::{ForecastResult, Provenance};
use crate::series::TimeSeries;
use crate::stats;

/// Anything that can forecast a horizon from a series.
pub trait Forecaster {
    fn name(&self) -> &str;
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult>;
}

fn flat(value: f64, horizon: usize) -> ForecastResult {
    ForecastResult {
        values: vec![value; horizon],
        ci_lower: None,
        ci_upper: None,
        provenance: Provenance::Fallback,
    }
}

fn from_values(values: Vec<f64>) -> ForecastResult {
    ForecastResult {
        values,
        ci_lower: None,
        ci_upper: None,
        provenance: Provenance::Fallback,
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "smoothing weight must be in (0, 1], got {alpha}"
        )));
    }
    Ok(())
}

/// Repeats the last observation.
pub fn naive_forecast(series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
    Ok(flat(series.last(), horizon))
}

/// Flat forecast at the mean of the trailing `n` observations.
pub fn sma_forecast(series: &TimeSeries, horizon: usize, n: usize) -> Result<ForecastResult> {
    if n == 0 {
        return Err(Error::InvalidInput("sma window must be at least 1".into()));
    }
    let len = series.len();
    if n > len {
        return Err(Error::WindowTooLarge { window: n, len });
    }
    Ok(flat(stats::mean(&series.values()[len - n..]), horizon))
}

fn ses_level(values: &[f64], alpha: f64) -> f64 {
    let mut level = values[0];
    for &y in &values[1..] {
        level = alpha * y + (1.0 - alpha) * level;
    }
    level
}

/// Simple exponential smoothing: flat forecast at the final level.
pub fn ses_forecast(series: &TimeSeries, horizon: usize, alpha: f64) -> Result<ForecastResult> {
    check_alpha(alpha)?;
    Ok(flat(ses_level(series.values(), alpha), horizon))
}

/// Additive Holt-Winters. Initialized from the first full period: level
/// is the period mean, trend the mean per-position difference across the
/// first two periods (per step), seasonals the first-period deviations
/// from its mean.
pub fn holt_winters_forecast(
    series: &TimeSeries,
    horizon: usize,
    alpha: f64,
    beta: f64,
    gamma: f64,
    period: usize,
) -> Result<ForecastResult> {
    check_alpha(alpha)?;
    for w in [beta, gamma] {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidInput(format!(
                "smoothing weight must be in [0, 1], got {w}"
            )));
        }
    }
    if period < 2 {
        return Err(Error::InvalidInput("period must be at least 2".into()));
    }
    let values = series.values();
    let n = values.len();
    if n < 2 * period {
        return Err(Error::TooShort {
            needed: 2 * period,
            got: n,
        });
    }

    let mut level = stats::mean(&values[..period]);
    let mut trend = (0..period)
        .map(|i| values[period + i] - values[i])
        .sum::<f64>()
        / (period * period) as f64;
    let mut seasonal: Vec<f64> = values[..period].iter().map(|y| y - level).collect();

    for (t, &y) in values.iter().enumerate().skip(period) {
        let idx = t % period;
        let prev_level = level;
        level = alpha * (y - seasonal[idx]) + (1.0 - alpha) * (level + trend);
        trend = beta * (level - prev_level) + (1.0 - beta) * trend;
        seasonal[idx] = gamma * (y - level) + (1.0 - gamma) * seasonal[idx];
    }

    let forecast = (0..horizon)
        .map(|h| level + (h + 1) as f64 * trend + seasonal[(n + h) % period])
        .collect();
    Ok(from_values(forecast))
}

/// Two-line theta method. The theta-0 line is the least-squares linear
/// trend extrapolated; the theta-2 line's deviation from that trend,
/// 2(y - trend), is smoothed by SES (alpha fit on a 0.01 grid by one-step
/// SSE) and carried forward flat on top of the extrapolated trend. The
/// forecast averages the two lines, which works out to
/// trend(n+h) + smoothed_deviation / 2.
pub fn theta_forecast(series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
    let values = series.values();
    let n = values.len();
    if n < 4 {
        return Err(Error::TooShort { needed: 4, got: n });
    }
    let xs: Vec<f64> = (0..n).map(|i| i as f64).collect();
    let (slope, intercept, _) = stats::linear_regression(&xs, values);
    let deviations: Vec<f64> = values
        .iter()
        .enumerate()
        .map(|(t, y)| 2.0 * (y - (intercept + slope * t as f64)))
        .collect();

    let mut best_alpha = 0.01;
    let mut best_sse = f64::INFINITY;
    for step in 1..=100 {
        let alpha = step as f64 / 100.0;
        let mut level = deviations[0];
        let mut sse = 0.0;
        for &z in &deviations[1..] {
            let err = z - level;
            sse += err * err;
            level = alpha * z + (1.0 - alpha) * level;
        }
        if sse < best_sse {
            best_sse = sse;
            best_alpha = alpha;
        }
    }
    let smoothed = ses_level(&deviations, best_alpha);

    let forecast = (0..horizon)
        .map(|h| intercept + slope * (n + h) as f64 + smoothed / 2.0)
        .collect();
    Ok(from_values(forecast))
}

/// Croston's method for intermittent demand: SES over non-zero demand
/// sizes and over inter-demand intervals, forecast = size level divided
/// by interval level. An all-zero series forecasts zero.
pub fn croston_forecast(series: &TimeSeries, horizon: usize, alpha: f64) -> Result<ForecastResult> {
    check_alpha(alpha)?;
    let values = series.values();
    let mut sizes = Vec::new();
    let mut intervals = Vec::new();
    let mut last_demand: Option<usize> = None;
    for (i, &y) in values.iter().enumerate() {
        if y != 0.0 {
            let interval = match last_demand {
                Some(prev) => i - prev,
                None => i + 1,
            };
            sizes.push(y);
            intervals.push(interval as f64);
            last_demand = Some(i);
        }
    }
    if sizes.is_empty() {
        return Ok(flat(0.0, horizon));
    }
    let size_level = ses_level(&sizes, alpha);
    let interval_level = ses_level(&intervals, alpha);
    Ok(flat(size_level / interval_level, horizon))
}

/// KNN on lag embeddings: the k windows closest (in Euclidean distance)
/// to the trailing window vote with their continuations, averaged
/// unweighted. When a chosen continuation is truncated, the forecast so
/// far is appended and the search repeats recursively until the horizon
/// is filled. Distance ties break toward the smaller start index.
pub fn knn_lag_forecast(
    series: &TimeSeries,
    horizon: usize,
    k: usize,
    lag: usize,
) -> Result<ForecastResult> {
    if k == 0 || lag == 0 {
        return Err(Error::InvalidInput("require k >= 1 and lag >= 1".into()));
    }
    let len = series.len();
    if len < lag + horizon + 1 {
        return Err(Error::TooShort {
            needed: lag + horizon + 1,
            got: len,
        });
    }
    let mut extended = series.values().to_vec();
    let target = len + horizon;
    while extended.len() < target {
        let cur = extended.len();
        let query = &extended[cur - lag..];
        let mut candidates: Vec<(f64, usize)> = (0..cur - lag)
            .map(|s| {
                let dist = extended[s..s + lag]
                    .iter()
                    .zip(query)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                (dist, s)
            })
            .collect();
        candidates.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
        candidates.truncate(k);

        let remaining = target - cur;
        let block = candidates
            .iter()
            .map(|&(_, s)| cur - (s + lag))
            .min()
            .expect("at least one candidate")
            .min(remaining);
        for j in 0..block {
            let sum: f64 = candidates.iter().map(|&(_, s)| extended[s + lag + j]).sum();
            extended.push(sum / candidates.len() as f64);
        }
    }
    Ok(from_values(extended[len..].to_vec()))
}

// ---------------------------------------------------------------------
// Trait adapters with the harness defaults.
// ---------------------------------------------------------------------

pub struct Naive;

impl Forecaster for Naive {
    fn name(&self) -> &str {
        "naive"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        naive_forecast(series, horizon)
    }
}

pub struct Sma {
    pub window: usize,
}

impl Default for Sma {
    fn default() -> Self {
        Self { window: 5 }
    }
}

impl Forecaster for Sma {
    fn name(&self) -> &str {
        "sma"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        sma_forecast(series, horizon, self.window.min(series.len()))
    }
}

pub struct Ses {
    pub alpha: f64,
}

impl Default for Ses {
    fn default() -> Self {
        Self { alpha: 0.3 }
    }
}

impl Forecaster for Ses {
    fn name(&self) -> &str {
        "ses"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        ses_forecast(series, horizon, self.alpha)
    }
}

pub struct HoltWinters {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Seasonal period; when absent the first ACF peak is used, falling
    /// back to 12.
    pub period: Option<usize>,
}

impl Default for HoltWinters {
    fn default() -> Self {
        Self {
            alpha: 0.3,
            beta: 0.1,
            gamma: 0.1,
            period: None,
        }
    }
}

impl Forecaster for HoltWinters {
    fn name(&self) -> &str {
        "holt_winters"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        let period = match self.period {
            Some(p) => p,
            None => {
                let detected = detect_seasonality(series, None)
                    .unwrap_or_default()
                    .first()
                    .copied()
                    .unwrap_or(12);
                let feasible = detected >= 2 && series.len() >= 2 * detected;
                if feasible {
                    detected
                } else {
                    12
                }
            }
        };
        holt_winters_forecast(series, horizon, self.alpha, self.beta, self.gamma, period)
    }
}

pub struct Theta;

impl Forecaster for Theta {
    fn name(&self) -> &str {
        "theta"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        theta_forecast(series, horizon)
    }
}

pub struct Croston {
    pub alpha: f64,
}

impl Default for Croston {
    fn default() -> Self {
        Self { alpha: 0.3 }
    }
}

impl Forecaster for Croston {
    fn name(&self) -> &str {
        "croston"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        croston_forecast(series, horizon, self.alpha)
    }
}

pub struct KnnLag {
    pub k: usize,
    /// Embedding length; when absent max(10, len/10) clamped to len/2.
    pub lag: Option<usize>,
}

impl Default for KnnLag {
    fn default() -> Self {
        Self { k: 5, lag: None }
    }
}

impl Forecaster for KnnLag {
    fn name(&self) -> &str {
        "knn_lag"
    }
    fn forecast(&self, series: &TimeSeries, horizon: usize) -> Result<ForecastResult> {
        let len = series.len();
        let lag = self.lag.unwrap_or_else(|| (len / 10).max(10).min(len / 2).max(1));
        knn_lag_forecast(series, horizon, self.k, lag)
    }
}
