//! Evaluation harness: size-error sweeps over retention ranges, quartile
//! statistics, IoU-based detection matching, COCO-style detection metrics,
//! synthetic scene generation and box-plot rendering.

mod boxplot;
mod matching;
mod metrics;
mod quartiles;
mod sweep;
mod synth;

pub use boxplot::render_boxplot_svg;
pub use matching::{iou, match_detections, MatchPair, MatchResult};
pub use metrics::{detection_metrics, evaluation_frames, DetectionMetrics, EvalFrame};
pub use quartiles::{quartile_summary, QuartileSummary};
pub use sweep::{
    run_size_sweep, size_errors_from_csv, size_errors_to_csv, summarize_records, SummaryDoc,
    SummaryEntry, SweepConfig,
};
pub use synth::{generate_synthetic_scene, SceneSpec, SyntheticScene};

use crate::filtering::RetentionRange;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvalError {
    #[error("empty set: no values to summarize")]
    EmptySet,
    #[error("invalid scene spec: {0}")]
    InvalidScene(String),
    #[error("cannot place {requested} fruits without overlap after {attempts} attempts")]
    Placement { requested: usize, attempts: usize },
    #[error("io error: {0}")]
    Io(String),
}

/// The six size estimators, in canonical reporting order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Estimator {
    Bbox2d,
    Lseg2d,
    Hough2d,
    Lseg3d,
    Lsq3d,
    Ransac3d,
}

impl Estimator {
    pub fn all() -> [Estimator; 6] {
        [
            Estimator::Bbox2d,
            Estimator::Lseg2d,
            Estimator::Hough2d,
            Estimator::Lseg3d,
            Estimator::Lsq3d,
            Estimator::Ransac3d,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Estimator::Bbox2d => "2d-bbox",
            Estimator::Lseg2d => "2d-lseg",
            Estimator::Hough2d => "2d-ht",
            Estimator::Lseg3d => "3d-lseg",
            Estimator::Lsq3d => "3d-lsq",
            Estimator::Ransac3d => "3d-ransac",
        }
    }

    pub fn is_3d(&self) -> bool {
        matches!(
            self,
            Estimator::Lseg3d | Estimator::Lsq3d | Estimator::Ransac3d
        )
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Estimator {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "2d-bbox" => Ok(Estimator::Bbox2d),
            "2d-lseg" => Ok(Estimator::Lseg2d),
            "2d-ht" => Ok(Estimator::Hough2d),
            "3d-lseg" => Ok(Estimator::Lseg3d),
            "3d-lsq" => Ok(Estimator::Lsq3d),
            "3d-ransac" => Ok(Estimator::Ransac3d),
            other => Err(format!(
                "unknown estimator '{other}' (expected one of: 2d-bbox, 2d-lseg, 2d-ht, 3d-lseg, 3d-lsq, 3d-ransac)"
            )),
        }
    }
}

/// Outcome of one (fruit, estimator, retention) evaluation. Failures are
/// recorded as skips with their reason, never silently dropped.
#[derive(Debug, Clone, PartialEq)]
pub enum RecordOutcome {
    Estimated {
        d_est_mm: f64,
        d_gt_mm: f64,
        /// Signed error, identically `d_est_mm - d_gt_mm`.
        error_mm: f64,
    },
    Skipped {
        d_gt_mm: Option<f64>,
        reason: String,
    },
}

/// One row of the size-error sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SizeErrorRecord {
    pub frame_id: String,
    pub fruit_id: String,
    pub estimator: Estimator,
    pub retention: RetentionRange,
    pub outcome: RecordOutcome,
}

impl SizeErrorRecord {
    pub fn estimated(
        frame_id: &str,
        fruit_id: &str,
        estimator: Estimator,
        retention: RetentionRange,
        d_est_mm: f64,
        d_gt_mm: f64,
    ) -> Self {
        Self {
            frame_id: frame_id.to_string(),
            fruit_id: fruit_id.to_string(),
            estimator,
            retention,
            outcome: RecordOutcome::Estimated {
                d_est_mm,
                d_gt_mm,
                error_mm: d_est_mm - d_gt_mm,
            },
        }
    }

    pub fn skipped(
        frame_id: &str,
        fruit_id: &str,
        estimator: Estimator,
        retention: RetentionRange,
        d_gt_mm: Option<f64>,
        reason: impl Into<String>,
    ) -> Self {
        Self {
            frame_id: frame_id.to_string(),
            fruit_id: fruit_id.to_string(),
            estimator,
            retention,
            outcome: RecordOutcome::Skipped {
                d_gt_mm,
                reason: reason.into(),
            },
        }
    }

    pub fn error_mm(&self) -> Option<f64> {
        match &self.outcome {
            RecordOutcome::Estimated { error_mm, .. } => Some(*error_mm),
            RecordOutcome::Skipped { .. } => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn estimator_names_round_trip() {
        for e in Estimator::all() {
            assert_eq!(e.name().parse::<Estimator>().unwrap(), e);
        }
        assert!("4d-magic".parse::<Estimator>().is_err());
    }

    #[test]
    fn record_error_is_est_minus_gt() {
        let r = SizeErrorRecord::estimated(
            "f",
            "a",
            Estimator::Lseg2d,
            RetentionRange::full(),
            70.5,
            76.0,
        );
        assert_eq!(r.error_mm(), Some(70.5 - 76.0));
    }
}
