//! Similarity-based time-series forecasting.
//!
//! The engine forecasts by retrieving historical segments similar to the
//! most recent one (under an ensemble of similarity measures, optionally
//! across several window sizes) and combining their continuations,
//! falling back to a decomposition forecaster with Monte-Carlo
//! confidence bands when similarity search is not applicable. Around the
//! engine: anomaly and seasonality detection, explainability reports,
//! forecast evaluation metrics with time-ordered cross-validation,
//! lightweight reference forecasters, and a benchmark harness with
//! synthetic generators, three ranking schemes, Pareto analysis, and
//! empirical complexity fitting.

pub mod baselines;
pub mod bench;
pub mod diagnostics;
pub mod digest;
pub mod engine;
pub mod error;
pub mod forecaster;
pub mod metrics;
pub mod report;
pub mod rng;
pub mod segmentation;
pub mod series;
pub mod similarity;
pub mod stats;

pub use digest::ContentDigest;
pub use engine::{EngineConfig, EngineState};
pub use error::{Error, Result};
pub use forecaster::{ForecastResult, Provenance};
pub use rng::SeededRng;
pub use series::{load_csv, save_csv, ColumnSelector, TimeSeries};
pub use similarity::SimilarityMethod;
