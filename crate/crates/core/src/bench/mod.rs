//! Benchmark harness: synthetic data, execution, rankings, Pareto
//! analysis, and complexity fitting.

pub mod complexity;
pub mod pareto;
pub mod ranking;
pub mod runner;
pub mod synthetic;

pub use complexity::{fit_complexity, ComplexityClass, ComplexityFit};
pub use pareto::{pareto_frontier, ParetoRow};
pub use ranking::{rank_average, rank_normalized, rank_wins, RankingRow, RankingScheme, RankingTable};
pub use runner::{run_benchmark, BenchmarkRecord, SpinexForecaster, BENCH_METRICS};
pub use synthetic::{generate_synthetic, SyntheticFunction, SyntheticSpec};
