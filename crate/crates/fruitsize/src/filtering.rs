//! Percentile-based depth outlier removal.
//!
//! Depth pixels of a fruit mask are sorted by depth and only those whose
//! rank falls inside a retention band (e.g. 20%-80%) are kept. Nearest-rank
//! semantics: on a stable ascending sort, 1-based rank `k` survives when
//! `ceil(lower*N) <= k <= floor(upper*N)`. The median-rank pixel is always
//! kept so the result is never empty.

use crate::geometry::Pixel;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FilterError {
    #[error("empty mask: no depth pixels to filter")]
    EmptyMask,
    #[error("invalid retention range: require 0 <= lower < upper <= 1, got {lower}..{upper}")]
    InvalidRange { lower: f64, upper: f64 },
    #[error("malformed retention range '{0}', expected LO:HI in percent, e.g. 10:90")]
    ParseError(String),
}

/// Percentile band of sorted depths retained by outlier removal.
/// `20%-80%` keeps the middle 60% of depth ranks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetentionRange {
    lower: f64,
    upper: f64,
}

impl RetentionRange {
    pub fn new(lower: f64, upper: f64) -> Result<Self, FilterError> {
        let ok = lower >= 0.0 && lower < upper && upper <= 1.0;
        if !ok || !lower.is_finite() || !upper.is_finite() {
            return Err(FilterError::InvalidRange { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// Full retention, 0%-100%: keeps every pixel.
    pub fn full() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
        }
    }

    pub fn lower_percentile(&self) -> f64 {
        self.lower
    }

    pub fn upper_percentile(&self) -> f64 {
        self.upper
    }

    /// The evaluation grid: symmetric bands from 0%-100% down to 40%-60%
    /// in steps of 5%.
    pub fn sweep_grid() -> Vec<RetentionRange> {
        (0..9)
            .map(|i| {
                let a = 0.05 * i as f64;
                RetentionRange::new(a, 1.0 - a).unwrap()
            })
            .collect()
    }
}

impl fmt::Display for RetentionRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}",
            (self.lower * 100.0).round(),
            (self.upper * 100.0).round()
        )
    }
}

impl FromStr for RetentionRange {
    type Err = FilterError;

    /// Parses `"LO:HI"` given in percent, e.g. `"10:90"`.
    fn from_str(s: &str) -> Result<Self, FilterError> {
        let (lo, hi) = s
            .split_once(':')
            .ok_or_else(|| FilterError::ParseError(s.to_string()))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .map_err(|_| FilterError::ParseError(s.to_string()))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .map_err(|_| FilterError::ParseError(s.to_string()))?;
        RetentionRange::new(lo / 100.0, hi / 100.0)
    }
}

/// Snaps values that are within 1e-9 of an integer so that exact
/// percentile grids (0.05 steps and the like) hit integer ranks despite
/// binary rounding of the fraction.
fn snap(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-9 {
        r
    } else {
        x
    }
}

/// Keeps the pixels whose depth rank falls inside the retention band.
///
/// The sort is stable (ties keep input order); the output preserves the
/// original relative order of the survivors. The median-rank pixel
/// (lower median for even counts) is always retained, so degenerate
/// bands on tiny masks still yield at least one pixel.
pub fn filter_by_depth_percentile(
    pixels: &[Pixel],
    range: RetentionRange,
) -> Result<Vec<Pixel>, FilterError> {
    let n = pixels.len();
    if n == 0 {
        return Err(FilterError::EmptyMask);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pixels[a].z.total_cmp(&pixels[b].z));

    let lo_rank = (snap(range.lower * n as f64).ceil() as usize).max(1);
    let hi_rank = snap(range.upper * n as f64).floor() as usize;
    let median_pos = (n - 1) / 2;

    let mut keep = vec![false; n];
    for (pos, &idx) in order.iter().enumerate() {
        let rank = pos + 1;
        if (rank >= lo_rank && rank <= hi_rank) || pos == median_pos {
            keep[idx] = true;
        }
    }
    Ok(pixels
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(p, _)| *p)
        .collect())
}

/// Arithmetic mean of the depth values.
pub fn mean_depth(pixels: &[Pixel]) -> Result<f64, FilterError> {
    if pixels.is_empty() {
        return Err(FilterError::EmptyMask);
    }
    Ok(pixels.iter().map(|p| p.z).sum::<f64>() / pixels.len() as f64)
}
