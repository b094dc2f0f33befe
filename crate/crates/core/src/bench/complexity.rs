//! Empirical complexity fitting: polynomial (linear in log-log),
//! logarithmic, and exponential models over (size, time) measurements.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComplexityClass {
    Poly,
    Log,
    Exp,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexityFit {
    pub class: ComplexityClass,
    /// Poly: the log-log slope (the exponent). Log: the slope on
    /// time vs ln(size). Exp: the rate on ln(time) vs size.
    pub exponent_or_rate: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub big_o: String,
}

/// Fits all three candidate models and returns the one with the highest
/// R-squared. Constant times are ambiguous: the result is a degenerate
/// polynomial with exponent 0 and NaN R-squared.
pub fn fit_complexity(sizes: &[f64], times: &[f64]) -> Result<ComplexityFit> {
    if sizes.len() != times.len() {
        return Err(Error::LengthMismatch {
            left: sizes.len(),
            right: times.len(),
        });
    }
    if sizes.len() < 3 {
        return Err(Error::TooShort {
            needed: 3,
            got: sizes.len(),
        });
    }
    if sizes.iter().chain(times).any(|v| !v.is_finite() || *v <= 0.0) {
        return Err(Error::InvalidInput(
            "sizes and times must all be positive".into(),
        ));
    }
    if times.windows(2).all(|w| w[0] == w[1]) {
        return Ok(ComplexityFit {
            class: ComplexityClass::Poly,
            exponent_or_rate: 0.0,
            intercept: times[0].ln(),
            r_squared: f64::NAN,
            big_o: "O(1)".to_string(),
        });
    }

    let ln_sizes: Vec<f64> = sizes.iter().map(|s| s.ln()).collect();
    let ln_times: Vec<f64> = times.iter().map(|t| t.ln()).collect();

    let (poly_slope, poly_icept, poly_r2) = stats::linear_regression(&ln_sizes, &ln_times);
    let (log_slope, log_icept, log_r2) = stats::linear_regression(&ln_sizes, times);
    let (exp_rate, exp_icept, exp_r2) = stats::linear_regression(sizes, &ln_times);

    let candidates = [
        (ComplexityClass::Poly, poly_slope, poly_icept, poly_r2),
        (ComplexityClass::Log, log_slope, log_icept, log_r2),
        (ComplexityClass::Exp, exp_rate, exp_icept, exp_r2),
    ];
    let best = candidates
        .into_iter()
        .max_by(|a, b| {
            let ra = if a.3.is_nan() { f64::NEG_INFINITY } else { a.3 };
            let rb = if b.3.is_nan() { f64::NEG_INFINITY } else { b.3 };
            ra.partial_cmp(&rb).unwrap()
        })
        .expect("three candidates");

    let (class, parameter, intercept, r_squared) = best;
    let big_o = match class {
        ComplexityClass::Poly => format!("O(n^{parameter:.2})"),
        ComplexityClass::Log => "O(log n)".to_string(),
        ComplexityClass::Exp => "O(e^n)".to_string(),
    };
    Ok(ComplexityFit {
        class,
        exponent_or_rate: parameter,
        intercept,
        r_squared,
        big_o,
    })
}
