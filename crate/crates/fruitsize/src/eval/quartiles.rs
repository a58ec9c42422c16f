//! Box-plot quartile statistics.
//!
//! Quartiles use linear interpolation between closest ranks (the
//! convention of standard plotting tools). Whiskers are the formula
//! values Q4 = Q3 + 1.5 IQR and Q0 = Q1 - 1.5 IQR; values outside
//! [Q0, Q4] are counted as outliers, not discarded.

use super::EvalError;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuartileSummary {
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
    /// Q0 = Q1 - 1.5 (Q3 - Q1).
    pub whisker_low: f64,
    /// Q4 = Q3 + 1.5 (Q3 - Q1).
    pub whisker_high: f64,
    pub n_outliers: usize,
    pub n_total: usize,
}

/// Percentile by linear interpolation between closest ranks on a sorted
/// slice: rank = (n - 1) * p.
fn percentile_linear(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let rank = (n - 1) as f64 * p;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        let frac = rank - lo as f64;
        sorted[lo] + frac * (sorted[hi] - sorted[lo])
    }
}

pub fn quartile_summary(values: &[f64]) -> Result<QuartileSummary, EvalError> {
    if values.is_empty() {
        return Err(EvalError::EmptySet);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = percentile_linear(&sorted, 0.25);
    let q2 = percentile_linear(&sorted, 0.50);
    let q3 = percentile_linear(&sorted, 0.75);
    let iqr = q3 - q1;
    let whisker_low = q1 - 1.5 * iqr;
    let whisker_high = q3 + 1.5 * iqr;
    let n_outliers = sorted
        .iter()
        .filter(|&&v| v < whisker_low || v > whisker_high)
        .count();
    Ok(QuartileSummary {
        q1,
        q2,
        q3,
        whisker_low,
        whisker_high,
        n_outliers,
        n_total: sorted.len(),
    })
}
