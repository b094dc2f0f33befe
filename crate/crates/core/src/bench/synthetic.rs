//! The synthetic dataset catalogue: 25 generators over an evenly spaced
//! grid on [0, t_max] with seeded Gaussian noise.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SyntheticFunction {
    Linear,
    Quadratic,
    ExpGrowth,
    Sine,
    CosineLinear,
    CompositeSines,
    Logistic,
    DampedOscillation,
    Step,
    Sawtooth,
    Square,
    ExpDecay,
    Logarithmic,
    CompositeTrendSeasonal,
    Ar1,
    Cubic,
    Sigmoid,
    Impulse,
    CyclicalTrend,
    ExpSeasonal,
    PiecewiseLinear,
    Brownian,
    MultiTrend,
    ChaoticLogistic,
    Garch,
}

use SyntheticFunction::*;

impl SyntheticFunction {
    pub const ALL: [SyntheticFunction; 25] = [
        Linear,
        Quadratic,
        ExpGrowth,
        Sine,
        CosineLinear,
        CompositeSines,
        Logistic,
        DampedOscillation,
        Step,
        Sawtooth,
        Square,
        ExpDecay,
        Logarithmic,
        CompositeTrendSeasonal,
        Ar1,
        Cubic,
        Sigmoid,
        Impulse,
        CyclicalTrend,
        ExpSeasonal,
        PiecewiseLinear,
        Brownian,
        MultiTrend,
        ChaoticLogistic,
        Garch,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Linear => "linear",
            Quadratic => "quadratic",
            ExpGrowth => "exp_growth",
            Sine => "sine",
            CosineLinear => "cosine_linear",
            CompositeSines => "composite_sines",
            Logistic => "logistic",
            DampedOscillation => "damped_oscillation",
            Step => "step",
            Sawtooth => "sawtooth",
            Square => "square",
            ExpDecay => "exp_decay",
            Logarithmic => "logarithmic",
            CompositeTrendSeasonal => "composite_trend_seasonal",
            Ar1 => "ar1",
            Cubic => "cubic",
            Sigmoid => "sigmoid",
            Impulse => "impulse",
            CyclicalTrend => "cyclical_trend",
            ExpSeasonal => "exp_seasonal",
            PiecewiseLinear => "piecewise_linear",
            Brownian => "brownian",
            MultiTrend => "multi_trend",
            ChaoticLogistic => "chaotic_logistic",
            Garch => "garch",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.id() == name.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    /// The catalogue's default noise level. The composite
    /// trend-and-seasonal entry folds its 0.5 noise coefficient into the
    /// default.
    pub fn default_sigma(self) -> f64 {
        match self {
            Logistic | DampedOscillation | Sawtooth | ExpDecay | Sigmoid | Impulse => 0.05,
            CompositeTrendSeasonal | Ar1 => 0.5,
            Garch => 1.0,
            _ => 0.1,
        }
    }

    /// True for generators that iterate over the index instead of
    /// evaluating a closed form.
    pub fn is_recursive(self) -> bool {
        matches!(self, Ar1 | Brownian | ChaoticLogistic | Garch)
    }

    /// The noiseless closed form; recursive generators have none.
    pub fn closed_form(self, t: f64, t_max: f64) -> Option<f64> {
        use std::f64::consts::PI;
        let two_pi = 2.0 * PI;
        let v = match self {
            Linear => 0.5 * t,
            Quadratic => 0.05 * t * t,
            ExpGrowth => (0.1 * t).exp(),
            Sine => (two_pi * t).sin(),
            CosineLinear => (two_pi * t).cos() + 0.1 * t,
            CompositeSines => (two_pi * t).sin() + 0.5 * (2.0 * two_pi * t).sin(),
            Logistic | Sigmoid => 1.0 / (1.0 + (-t + 5.0).exp()),
            DampedOscillation => (-0.1 * t).exp() * (two_pi * t).sin(),
            Step => (t.floor() as i64).rem_euclid(2) as f64,
            Sawtooth => t - t.floor(),
            Square => {
                let s = (two_pi * t).sin();
                if s > 0.0 {
                    1.0
                } else if s < 0.0 {
                    -1.0
                } else {
                    0.0
                }
            }
            ExpDecay => (-0.2 * t).exp(),
            Logarithmic => (t + 1.0).ln(),
            CompositeTrendSeasonal => 0.01 * t * t + (two_pi * t).sin(),
            Cubic => 0.01 * t * t * t - 0.1 * t * t + 0.5 * t,
            Impulse => (-t).exp() * (two_pi * t).sin(),
            CyclicalTrend => (two_pi * t / 5.0).sin() + 0.05 * t,
            ExpSeasonal => (0.05 * t).exp() + 0.5 * (two_pi * t).sin(),
            PiecewiseLinear => {
                let b1 = t_max / 3.0;
                let b2 = 2.0 * t_max / 3.0;
                if t < b1 {
                    t
                } else if t < b2 {
                    b1
                } else {
                    b1 - (t - b2)
                }
            }
            MultiTrend => 0.01 * t * t + 0.1 * (two_pi * t).sin() + 0.05 * (0.1 * t).exp(),
            Ar1 | Brownian | ChaoticLogistic | Garch => return None,
        };
        Some(v)
    }
}

impl std::fmt::Display for SyntheticFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// A fully specified synthetic dataset.
#[derive(Debug, Clone)]
pub struct SyntheticSpec {
    pub function: SyntheticFunction,
    pub n_points: usize,
    pub t_max: f64,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn new(function: SyntheticFunction, n_points: usize, t_max: f64, seed: u64) -> Self {
        Self {
            function,
            n_points,
            t_max,
            noise_sigma: function.default_sigma(),
            seed,
        }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }
}

/// Generates the series: `f(t_i) + eps_i` over the inclusive grid, one
/// noise draw per point in index order. Recursive generators start from
/// state zero and feed the noise back through the recurrence.
pub fn generate_synthetic(spec: &SyntheticSpec) -> Result<TimeSeries> {
    if spec.n_points < 2 {
        return Err(Error::InvalidInput("n_points must be at least 2".into()));
    }
    if !spec.t_max.is_finite() || spec.t_max <= 0.0 {
        return Err(Error::InvalidInput("t_max must be positive".into()));
    }
    if spec.noise_sigma < 0.0 {
        return Err(Error::InvalidInput("noise_sigma must be non-negative".into()));
    }
    let n = spec.n_points;
    let step = spec.t_max / (n - 1) as f64;
    let sigma = spec.noise_sigma;
    let mut rng = SeededRng::new(spec.seed);

    let mut values = Vec::with_capacity(n);
    let mut state = 0.0f64;
    for i in 0..n {
        let noise = sigma * rng.standard_normal();
        let value = match spec.function {
            Ar1 => {
                state = 0.8 * state + noise;
                state
            }
            Brownian => {
                state += noise;
                state
            }
            ChaoticLogistic => {
                // The map input is clamped to [0, 1]: unbounded noise
                // feedback would spiral the bare recurrence to -inf.
                let u = state.clamp(0.0, 1.0);
                state = 3.9 * u * (1.0 - u) + noise;
                state
            }
            Garch => {
                state = (0.1 + 0.9 * state.abs()) * noise;
                state
            }
            f => {
                let t = i as f64 * step;
                f.closed_form(t, spec.t_max).expect("non-recursive") + noise
            }
        };
        values.push(value);
    }
    TimeSeries::new(values)
}
