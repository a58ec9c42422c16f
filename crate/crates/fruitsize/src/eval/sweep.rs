//! The per-estimator size-error sweep across retention ranges.
//!
//! For every (fruit, retention range) the masked depth pixels are
//! filtered once and shared by all estimators: the 2D family uses the
//! filtered set only for the mean depth (the mask itself stays intact),
//! the 3D family back-projects the filtered set. Per-fruit failures are
//! recorded as skips with their reason, so records + skips always equal
//! fruits x estimators x retention ranges.
//!
//! Fruits are processed in parallel; RANSAC seeds derive from the global
//! seed and the fruit id, so parallel and serial runs produce identical
//! output.

use super::{Estimator, EvalError, QuartileSummary, RecordOutcome, SizeErrorRecord};
use crate::dataset::{fallback_segment, AnnotatedFruit, Frame};
use crate::estimators_2d::{
    estimate_2d_bbox, estimate_2d_hough, estimate_2d_lseg, FruitMask, HoughConfig,
};
use crate::estimators_3d::{estimate_3d_lseg, lsq_sphere_fit, ransac_sphere, RansacConfig};
use crate::filtering::{filter_by_depth_percentile, mean_depth, RetentionRange};
use crate::geometry::{back_project, pixel_to_metric, FruitPointCloud, Pixel};
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Estimators to run, in reporting order.
    pub estimators: Vec<Estimator>,
    /// Retention ranges to sweep, in reporting order.
    pub retention_grid: Vec<RetentionRange>,
    pub ransac: RansacConfig,
    pub hough: HoughConfig,
}

impl SweepConfig {
    /// All six estimators over the standard grid, seeded.
    pub fn new(seed: u64) -> Self {
        Self {
            estimators: Estimator::all().to_vec(),
            retention_grid: RetentionRange::sweep_grid(),
            ransac: RansacConfig::new(seed),
            hough: HoughConfig::default(),
        }
    }
}

/// Stable 64-bit FNV-1a; the per-fruit RANSAC seed must not depend on
/// the platform or the standard library's hasher.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash = 0xcbf29ce484222325u64;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

struct FruitTask<'a> {
    frame: &'a Frame,
    fruit: &'a AnnotatedFruit,
}

fn skip_all(task: &FruitTask, config: &SweepConfig, reason: &str) -> Vec<SizeErrorRecord> {
    let gt = task.fruit.gt_diameter_mm;
    let mut records = Vec::with_capacity(config.estimators.len() * config.retention_grid.len());
    for &est in &config.estimators {
        for &retention in &config.retention_grid {
            records.push(SizeErrorRecord::skipped(
                &task.frame.frame_id,
                &task.fruit.fruit_id,
                est,
                retention,
                gt,
                reason,
            ));
        }
    }
    records
}

fn sweep_fruit(task: &FruitTask, config: &SweepConfig) -> Vec<SizeErrorRecord> {
    let frame = task.frame;
    let fruit = task.fruit;

    let Some(gt) = fruit.gt_diameter_mm else {
        return skip_all(task, config, "no ground-truth diameter");
    };

    let mask: FruitMask = match &fruit.mask {
        Some(m) => m.clone(),
        None => match fallback_segment(frame, &fruit.bbox) {
            Ok(m) => m,
            Err(e) => {
                return skip_all(
                    task,
                    config,
                    &format!("no mask and fallback segmentation failed: {e}"),
                )
            }
        },
    };

    let scale = frame.intrinsics.depth_scale;
    let depth_pixels: Vec<Pixel> = mask
        .pixels()
        .iter()
        .filter_map(|&(u, v)| {
            frame
                .depth
                .depth_mm(u as i64, v as i64, scale)
                .map(|z| Pixel::new(u as f64, v as f64, z))
        })
        .collect();
    if depth_pixels.is_empty() {
        return skip_all(task, config, "no valid depth pixels in mask");
    }

    // 2D pixel diameters do not depend on the retention range; outlier
    // removal only affects their mean-depth conversion.
    let d_p_bbox = estimate_2d_bbox(&fruit.bbox);
    let d_p_lseg = estimate_2d_lseg(&mask);
    let d_p_hough = estimate_2d_hough(&mask, &config.hough).map(|fit| fit.diameter());

    let fruit_seed = config.ransac.seed ^ fnv1a(fruit.fruit_id.as_bytes());
    let ransac_config = RansacConfig {
        seed: fruit_seed,
        ..config.ransac
    };

    // Filtered pixels, mean depth and the back-projected cloud are
    // computed once per retention range and shared across estimators.
    struct RetentionData {
        retention: RetentionRange,
        zbar: f64,
        cloud: Result<FruitPointCloud, String>,
    }
    let per_retention: Vec<RetentionData> = config
        .retention_grid
        .iter()
        .map(|&retention| {
            let filtered = filter_by_depth_percentile(&depth_pixels, retention)
                .expect("non-empty input always yields survivors");
            let zbar = mean_depth(&filtered).expect("filter output is non-empty");
            let cloud = back_project(&fruit.fruit_id, &filtered, &frame.intrinsics)
                .map_err(|e| e.to_string());
            RetentionData {
                retention,
                zbar,
                cloud,
            }
        })
        .collect();

    let mut records = Vec::with_capacity(config.estimators.len() * per_retention.len());
    for &est in &config.estimators {
        for data in &per_retention {
            let d_est: Result<f64, String> = match est {
                Estimator::Bbox2d => {
                    pixel_to_metric(d_p_bbox, data.zbar, &frame.intrinsics)
                        .map_err(|e| e.to_string())
                }
                Estimator::Lseg2d => {
                    pixel_to_metric(d_p_lseg, data.zbar, &frame.intrinsics)
                        .map_err(|e| e.to_string())
                }
                Estimator::Hough2d => d_p_hough.as_ref().map_err(|e| e.to_string()).and_then(
                    |&d_p| {
                        pixel_to_metric(d_p, data.zbar, &frame.intrinsics)
                            .map_err(|e| e.to_string())
                    },
                ),
                Estimator::Lseg3d => data
                    .cloud
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|cloud| estimate_3d_lseg(cloud).map_err(|e| e.to_string())),
                Estimator::Lsq3d => data
                    .cloud
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|cloud| {
                        lsq_sphere_fit(cloud)
                            .map(|fit| fit.diameter())
                            .map_err(|e| e.to_string())
                    }),
                Estimator::Ransac3d => data
                    .cloud
                    .as_ref()
                    .map_err(Clone::clone)
                    .and_then(|cloud| {
                        ransac_sphere(cloud, &ransac_config)
                            .map(|fit| fit.diameter())
                            .map_err(|e| e.to_string())
                    }),
            };
            records.push(match d_est {
                Ok(d) => SizeErrorRecord::estimated(
                    &frame.frame_id,
                    &fruit.fruit_id,
                    est,
                    data.retention,
                    d,
                    gt,
                ),
                Err(reason) => SizeErrorRecord::skipped(
                    &frame.frame_id,
                    &fruit.fruit_id,
                    est,
                    data.retention,
                    Some(gt),
                    reason,
                ),
            });
        }
    }
    records
}

fn sweep_all(frames: &[Frame], config: &SweepConfig) -> Vec<SizeErrorRecord> {
    let tasks: Vec<FruitTask> = frames
        .iter()
        .flat_map(|frame| frame.fruits.iter().map(move |fruit| FruitTask { frame, fruit }))
        .collect();
    tasks
        .par_iter()
        .map(|task| sweep_fruit(task, config))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// Runs the sweep over every fruit of every frame. `jobs` limits the
/// worker count (None uses the default pool); the output is identical
/// for any worker count.
pub fn run_size_sweep(
    frames: &[Frame],
    config: &SweepConfig,
    jobs: Option<usize>,
) -> Vec<SizeErrorRecord> {
    match jobs {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .expect("failed to build worker pool")
            .install(|| sweep_all(frames, config)),
        _ => sweep_all(frames, config),
    }
}

/// Serializes sweep records to CSV (one row per record, skips included).
pub fn size_errors_to_csv(records: &[SizeErrorRecord]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record([
            "fruit_id",
            "estimator",
            "retention_lo",
            "retention_hi",
            "d_est_mm",
            "d_gt_mm",
            "error_mm",
            "status",
            "skip_reason",
        ])
        .expect("csv header");
    for r in records {
        let retention_lo = format!("{}", r.retention.lower_percentile());
        let retention_hi = format!("{}", r.retention.upper_percentile());
        let row = match &r.outcome {
            RecordOutcome::Estimated {
                d_est_mm,
                d_gt_mm,
                error_mm,
            } => [
                r.fruit_id.clone(),
                r.estimator.name().to_string(),
                retention_lo,
                retention_hi,
                format!("{d_est_mm}"),
                format!("{d_gt_mm}"),
                format!("{error_mm}"),
                "ok".to_string(),
                String::new(),
            ],
            RecordOutcome::Skipped { d_gt_mm, reason } => [
                r.fruit_id.clone(),
                r.estimator.name().to_string(),
                retention_lo,
                retention_hi,
                String::new(),
                d_gt_mm.map(|d| format!("{d}")).unwrap_or_default(),
                String::new(),
                "skip".to_string(),
                reason.clone(),
            ],
        };
        writer.write_record(&row).expect("csv row");
    }
    String::from_utf8(writer.into_inner().expect("csv flush")).expect("csv is utf-8")
}

/// Parses records back from the CSV produced by [`size_errors_to_csv`].
/// The frame id is not a CSV column and comes back empty.
pub fn size_errors_from_csv(text: &str) -> Result<Vec<SizeErrorRecord>, String> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let mut records = Vec::new();
    for (i, row) in reader.records().enumerate() {
        let row = row.map_err(|e| format!("csv row {i}: {e}"))?;
        let field = |k: usize| row.get(k).unwrap_or("");
        let parse = |k: usize, name: &str| -> Result<f64, String> {
            field(k)
                .parse::<f64>()
                .map_err(|_| format!("csv row {i}: bad {name} '{}'", field(k)))
        };
        let estimator: Estimator = field(1).parse().map_err(|e| format!("csv row {i}: {e}"))?;
        let retention = RetentionRange::new(parse(2, "retention_lo")?, parse(3, "retention_hi")?)
            .map_err(|e| format!("csv row {i}: {e}"))?;
        let outcome = match field(7) {
            "ok" => RecordOutcome::Estimated {
                d_est_mm: parse(4, "d_est_mm")?,
                d_gt_mm: parse(5, "d_gt_mm")?,
                error_mm: parse(6, "error_mm")?,
            },
            "skip" => RecordOutcome::Skipped {
                d_gt_mm: if field(5).is_empty() {
                    None
                } else {
                    Some(parse(5, "d_gt_mm")?)
                },
                reason: field(8).to_string(),
            },
            other => return Err(format!("csv row {i}: unknown status '{other}'")),
        };
        records.push(SizeErrorRecord {
            frame_id: String::new(),
            fruit_id: field(0).to_string(),
            estimator,
            retention,
            outcome,
        });
    }
    Ok(records)
}

/// Quartile summaries grouped by (estimator, retention), in first
/// appearance order of the records.
#[derive(Debug, Clone)]
pub struct SummaryEntry {
    pub estimator: Estimator,
    pub retention: RetentionRange,
    pub n_estimated: usize,
    pub n_skipped: usize,
    pub quartiles: Option<QuartileSummary>,
}

pub fn summarize_records(records: &[SizeErrorRecord]) -> Vec<SummaryEntry> {
    let mut keys: Vec<(Estimator, RetentionRange)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.estimator, r.retention)) {
            keys.push((r.estimator, r.retention));
        }
    }
    keys.iter()
        .map(|&(estimator, retention)| {
            let mut errors = Vec::new();
            let mut skipped = 0usize;
            for r in records {
                if r.estimator != estimator || r.retention != retention {
                    continue;
                }
                match r.error_mm() {
                    Some(e) => errors.push(e),
                    None => skipped += 1,
                }
            }
            SummaryEntry {
                estimator,
                retention,
                n_estimated: errors.len(),
                n_skipped: skipped,
                quartiles: super::quartile_summary(&errors).ok(),
            }
        })
        .collect()
}

/// JSON document for the per-(estimator, retention) summaries.
#[derive(Debug, Serialize)]
pub struct SummaryDoc {
    pub schema_version: u32,
    pub entries: Vec<SummaryDocEntry>,
}

#[derive(Debug, Serialize)]
pub struct SummaryDocEntry {
    pub estimator: String,
    pub retention_lo: f64,
    pub retention_hi: f64,
    pub n_estimated: usize,
    pub n_skipped: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quartiles: Option<QuartileSummary>,
}

impl SummaryDoc {
    pub fn from_entries(entries: &[SummaryEntry]) -> Self {
        SummaryDoc {
            schema_version: 1,
            entries: entries
                .iter()
                .map(|e| SummaryDocEntry {
                    estimator: e.estimator.name().to_string(),
                    retention_lo: e.retention.lower_percentile(),
                    retention_hi: e.retention.upper_percentile(),
                    n_estimated: e.n_estimated,
                    n_skipped: e.n_skipped,
                    quartiles: e.quartiles,
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> Result<String, EvalError> {
        serde_json::to_string_pretty(self)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| EvalError::Io(e.to_string()))
    }
}
