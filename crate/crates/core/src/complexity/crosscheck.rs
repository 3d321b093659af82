use serde::Serialize;

use super::term::{ComplexityTerm, Params};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub params: Params,
    pub measured: f64,
    pub analytic: f64,
    pub ratio: f64,
    /// `ratio` divided by the first row's ratio (calibration point).
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioTable {
    pub term: String,
    pub rows: Vec<RatioRow>,
    /// `max(ratio) / min(ratio)` over the rows.
    pub drift: f64,
    /// Set when the drift exceeds 2x.
    pub alarm: bool,
}

/// Compares measured counts against `analytic` at each sample point. The
/// first sample calibrates the constant.
pub fn crosscheck_measured(analytic: &ComplexityTerm, samples: &[(Params, u64)]) -> Result<RatioTable> {
    if samples.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "need measurements at 3 or more sizes, got {}",
            samples.len()
        )));
    }
    let mut rows = Vec::with_capacity(samples.len());
    for (params, measured) in samples {
        let a = analytic.evaluate(params);
        if a <= 0.0 || !a.is_finite() {
            return Err(Error::InvalidProblem(format!(
                "analytic term `{analytic}` is not positive at the sample point"
            )));
        }
        let measured = *measured as f64;
        rows.push(RatioRow {
            params: *params,
            measured,
            analytic: a,
            ratio: measured / a,
            normalized: 0.0,
        });
    }
    let base = rows[0].ratio;
    for r in &mut rows {
        r.normalized = r.ratio / base;
    }
    let max = rows.iter().map(|r| r.ratio).fold(f64::MIN, f64::max);
    let min = rows.iter().map(|r| r.ratio).fold(f64::MAX, f64::min);
    let drift = max / min;
    Ok(RatioTable {
        term: analytic.to_string(),
        rows,
        drift,
        alarm: drift > 2.0,
    })
}
