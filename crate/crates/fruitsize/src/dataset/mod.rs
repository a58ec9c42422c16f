//! Dataset ingestion: manifest schema, frame/annotation loading,
//! detection files and the depth-threshold fallback segmenter.
//!
//! The manifest is a JSON document (schema_version 1) listing frames;
//! each frame references an RGB raster, a 16-bit single-channel depth
//! raster (value x depth_scale = millimetres, 0 = invalid) and carries
//! its fruit annotations. Masks are stored either as run-length-encoded
//! strings or as paths to single-channel images. All referenced rasters
//! are loaded and validated eagerly.

pub mod import;
pub mod rle;
mod segment;

pub use rle::RleMask;
pub use segment::fallback_segment;

use crate::estimators_2d::{BoundingBox, FruitMask};
use crate::geometry::CameraIntrinsics;
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Hard acceptance band for ground-truth diameters (mm); values outside
/// a looser plausibility band only log a warning.
const DIAMETER_HARD_RANGE_MM: (f64, f64) = (5.0, 300.0);
const DIAMETER_WARN_RANGE_MM: (f64, f64) = (20.0, 120.0);

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed manifest {path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("frame {frame_id}: missing raster {path}")]
    MissingRaster { frame_id: String, path: PathBuf },
    #[error("frame {frame_id}: cannot decode raster {path}: {message}")]
    Raster {
        frame_id: String,
        path: PathBuf,
        message: String,
    },
    #[error("frame {frame_id}: rgb is {rgb_w}x{rgb_h} but depth is {depth_w}x{depth_h}")]
    ResolutionMismatch {
        frame_id: String,
        rgb_w: u32,
        rgb_h: u32,
        depth_w: u32,
        depth_h: u32,
    },
    #[error("fruit {fruit_id}: bad mask: {message}")]
    Mask { fruit_id: String, message: String },
    #[error("referential error: {0}")]
    Referential(String),
    #[error("empty mask: {0}")]
    EmptyMask(String),
}

impl DatasetError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        DatasetError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Ripeness {
    Ripe,
    Unripe,
}

impl std::fmt::Display for Ripeness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ripeness::Ripe => write!(f, "Ripe"),
            Ripeness::Unripe => write!(f, "Unripe"),
        }
    }
}

impl std::str::FromStr for Ripeness {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "ripe" => Ok(Ripeness::Ripe),
            "unripe" => Ok(Ripeness::Unripe),
            other => Err(format!("unknown ripeness class '{other}'")),
        }
    }
}

/// One annotated fruit instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedFruit {
    pub fruit_id: String,
    pub bbox: BoundingBox,
    pub mask: Option<FruitMask>,
    pub ripeness: Ripeness,
    pub gt_diameter_mm: Option<f64>,
}

/// 16-bit single-channel depth raster. Stored values scale to
/// millimetres through the frame intrinsics' depth_scale; 0 is invalid.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    width: u32,
    height: u32,
    data: Vec<u16>,
}

impl DepthMap {
    pub fn new(width: u32, height: u32, data: Vec<u16>) -> Result<Self, DatasetError> {
        if data.len() != (width as usize) * (height as usize) {
            return Err(DatasetError::Schema(format!(
                "depth buffer has {} samples, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn raw(&self) -> &[u16] {
        &self.data
    }

    /// Raw stored value at (u, v); 0 when out of bounds.
    pub fn value(&self, u: i64, v: i64) -> u16 {
        if u < 0 || v < 0 || u >= self.width as i64 || v >= self.height as i64 {
            return 0;
        }
        self.data[v as usize * self.width as usize + u as usize]
    }

    /// Depth in millimetres, or None when invalid/out of bounds.
    pub fn depth_mm(&self, u: i64, v: i64, depth_scale: f64) -> Option<f64> {
        let raw = self.value(u, v);
        if raw == 0 {
            None
        } else {
            Some(raw as f64 * depth_scale)
        }
    }
}

/// A fully validated RGB-D frame with its annotations.
#[derive(Debug, Clone)]
pub struct Frame {
    pub frame_id: String,
    pub width: u32,
    pub height: u32,
    pub depth: DepthMap,
    pub intrinsics: CameraIntrinsics,
    pub fruits: Vec<AnnotatedFruit>,
    pub capture_date: Option<String>,
    pub rgb_path: PathBuf,
    pub depth_path: PathBuf,
}

/// One externally supplied detection.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionRecord {
    pub frame_id: String,
    pub bbox: BoundingBox,
    pub class: Ripeness,
    pub score: f64,
}

// ---------------------------------------------------------------------
// On-disk schema (schema_version 1)
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestDoc {
    pub schema_version: u32,
    pub frames: Vec<ManifestFrame>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFrame {
    pub frame_id: String,
    pub rgb: String,
    pub depth: String,
    pub intrinsics: ManifestIntrinsics,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub capture_date: Option<String>,
    pub fruits: Vec<ManifestFruit>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestIntrinsics {
    pub focal_length_px: f64,
    pub principal_point: (f64, f64),
    pub depth_scale: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestFruit {
    pub fruit_id: String,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub ripeness: Ripeness,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gt_diameter_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask: Option<ManifestMask>,
}

/// Exactly one of `rle` or `path` must be present.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestMask {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rle: Option<RleMask>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionEntry {
    pub frame_id: String,
    #[serde(rename = "box")]
    pub bbox: [f64; 4],
    pub class: Ripeness,
    pub score: f64,
}

/// Serializes a manifest document with a trailing newline.
pub fn write_manifest(path: &Path, doc: &ManifestDoc) -> Result<(), DatasetError> {
    let mut bytes = serde_json::to_vec_pretty(doc).map_err(|e| DatasetError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| DatasetError::io(path, e))
}

fn bbox_from_array(fruit_id: &str, a: [f64; 4]) -> Result<BoundingBox, DatasetError> {
    BoundingBox::new(a[0], a[1], a[2], a[3])
        .map_err(|e| DatasetError::Schema(format!("fruit {fruit_id}: {e}")))
}

fn load_depth_raster(frame_id: &str, path: &Path) -> Result<DepthMap, DatasetError> {
    if !path.exists() {
        return Err(DatasetError::MissingRaster {
            frame_id: frame_id.to_string(),
            path: path.to_path_buf(),
        });
    }
    let img = image::open(path).map_err(|e| DatasetError::Raster {
        frame_id: frame_id.to_string(),
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    match img {
        image::DynamicImage::ImageLuma16(buf) => {
            let (w, h) = (buf.width(), buf.height());
            DepthMap::new(w, h, buf.into_raw())
        }
        other => Err(DatasetError::Raster {
            frame_id: frame_id.to_string(),
            path: path.to_path_buf(),
            message: format!(
                "depth raster must be 16-bit single channel, got {:?}",
                other.color()
            ),
        }),
    }
}

fn load_mask_raster(fruit_id: &str, path: &Path) -> Result<Vec<(i32, i32)>, DatasetError> {
    if !path.exists() {
        return Err(DatasetError::Mask {
            fruit_id: fruit_id.to_string(),
            message: format!("mask raster {} does not exist", path.display()),
        });
    }
    let img = image::open(path)
        .map_err(|e| DatasetError::Mask {
            fruit_id: fruit_id.to_string(),
            message: format!("cannot decode {}: {e}", path.display()),
        })?
        .to_luma8();
    let mut pixels = Vec::new();
    for (u, v, p) in img.enumerate_pixels() {
        if p.0[0] != 0 {
            pixels.push((u as i32, v as i32));
        }
    }
    Ok(pixels)
}

fn validate_diameter(fruit_id: &str, d: f64) -> Result<(), DatasetError> {
    if !d.is_finite() || d <= 0.0 || d < DIAMETER_HARD_RANGE_MM.0 || d > DIAMETER_HARD_RANGE_MM.1 {
        return Err(DatasetError::Schema(format!(
            "fruit {fruit_id}: ground-truth diameter {d} mm outside hard range {:?}",
            DIAMETER_HARD_RANGE_MM
        )));
    }
    if d < DIAMETER_WARN_RANGE_MM.0 || d > DIAMETER_WARN_RANGE_MM.1 {
        log::warn!(
            "fruit {fruit_id}: ground-truth diameter {d} mm outside plausible range {:?}",
            DIAMETER_WARN_RANGE_MM
        );
    }
    Ok(())
}

fn build_fruit(
    entry: &ManifestFruit,
    base_dir: &Path,
    frame_size: (u32, u32),
) -> Result<AnnotatedFruit, DatasetError> {
    let fruit_id = &entry.fruit_id;
    let bbox = bbox_from_array(fruit_id, entry.bbox)?;
    if let Some(d) = entry.gt_diameter_mm {
        validate_diameter(fruit_id, d)?;
    }
    let mask = match &entry.mask {
        None => None,
        Some(m) => {
            let pixels = match (&m.rle, &m.path) {
                (Some(rle), None) => rle::decode(rle).map_err(|e| DatasetError::Mask {
                    fruit_id: fruit_id.clone(),
                    message: e.to_string(),
                })?,
                (None, Some(rel)) => load_mask_raster(fruit_id, &base_dir.join(rel))?,
                _ => {
                    return Err(DatasetError::Mask {
                        fruit_id: fruit_id.clone(),
                        message: "mask must carry exactly one of 'rle' or 'path'".into(),
                    })
                }
            };
            let mask = FruitMask::new(pixels).map_err(|_| DatasetError::Mask {
                fruit_id: fruit_id.clone(),
                message: "mask is empty".into(),
            })?;
            let (u_min, v_min, u_max, v_max) = mask.extent();
            if !(bbox.contains(u_min as f64, v_min as f64)
                && bbox.contains(u_max as f64, v_max as f64))
            {
                return Err(DatasetError::Mask {
                    fruit_id: fruit_id.clone(),
                    message: format!(
                        "mask extent ({u_min},{v_min})..({u_max},{v_max}) leaves box [{}, {}, {}, {}]",
                        bbox.u_min, bbox.v_min, bbox.u_max, bbox.v_max
                    ),
                });
            }
            if u_min < 0
                || v_min < 0
                || u_max >= frame_size.0 as i32
                || v_max >= frame_size.1 as i32
            {
                return Err(DatasetError::Mask {
                    fruit_id: fruit_id.clone(),
                    message: "mask leaves the frame".into(),
                });
            }
            Some(mask)
        }
    };
    Ok(AnnotatedFruit {
        fruit_id: fruit_id.clone(),
        bbox,
        mask,
        ripeness: entry.ripeness,
        gt_diameter_mm: entry.gt_diameter_mm,
    })
}

/// Loads and fully validates a manifest. Every referenced raster must
/// exist and decode; RGB and depth resolutions must match; every fruit
/// invariant is checked eagerly.
pub fn load_manifest(path: &Path) -> Result<Vec<Frame>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
    let doc: ManifestDoc = serde_json::from_str(&text).map_err(|e| DatasetError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if doc.schema_version != 1 {
        return Err(DatasetError::Schema(format!(
            "unsupported schema_version {}",
            doc.schema_version
        )));
    }
    let base_dir = path.parent().unwrap_or_else(|| Path::new("."));

    let mut frames = Vec::with_capacity(doc.frames.len());
    let mut frame_ids = HashSet::new();
    let mut fruit_ids = HashSet::new();
    for entry in &doc.frames {
        if !frame_ids.insert(entry.frame_id.clone()) {
            return Err(DatasetError::Schema(format!(
                "duplicate frame_id '{}'",
                entry.frame_id
            )));
        }
        let rgb_path = base_dir.join(&entry.rgb);
        let depth_path = base_dir.join(&entry.depth);
        if !rgb_path.exists() {
            return Err(DatasetError::MissingRaster {
                frame_id: entry.frame_id.clone(),
                path: rgb_path,
            });
        }
        let rgb = image::open(&rgb_path).map_err(|e| DatasetError::Raster {
            frame_id: entry.frame_id.clone(),
            path: rgb_path.clone(),
            message: e.to_string(),
        })?;
        let depth = load_depth_raster(&entry.frame_id, &depth_path)?;
        if rgb.width() != depth.width() || rgb.height() != depth.height() {
            return Err(DatasetError::ResolutionMismatch {
                frame_id: entry.frame_id.clone(),
                rgb_w: rgb.width(),
                rgb_h: rgb.height(),
                depth_w: depth.width(),
                depth_h: depth.height(),
            });
        }
        let intrinsics = CameraIntrinsics::new(
            entry.intrinsics.focal_length_px,
            entry.intrinsics.principal_point,
            entry.intrinsics.depth_scale,
        )
        .map_err(|e| DatasetError::Schema(format!("frame {}: {e}", entry.frame_id)))?;

        let mut fruits = Vec::with_capacity(entry.fruits.len());
        for fruit_entry in &entry.fruits {
            if !fruit_ids.insert(fruit_entry.fruit_id.clone()) {
                return Err(DatasetError::Schema(format!(
                    "duplicate fruit_id '{}'",
                    fruit_entry.fruit_id
                )));
            }
            fruits.push(build_fruit(
                fruit_entry,
                base_dir,
                (depth.width(), depth.height()),
            )?);
        }
        frames.push(Frame {
            frame_id: entry.frame_id.clone(),
            width: depth.width(),
            height: depth.height(),
            depth,
            intrinsics,
            fruits,
            capture_date: entry.capture_date.clone(),
            rgb_path,
            depth_path,
        });
    }
    Ok(frames)
}

/// Loads a detection file and validates it against the loaded frames.
/// Records come back grouped by frame_id (stable within a frame).
pub fn load_detections(
    path: &Path,
    frames: &[Frame],
) -> Result<Vec<DetectionRecord>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|e| DatasetError::io(path, e))?;
    let entries: Vec<DetectionEntry> =
        serde_json::from_str(&text).map_err(|e| DatasetError::Json {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
    let known: HashSet<&str> = frames.iter().map(|f| f.frame_id.as_str()).collect();

    let mut records = Vec::with_capacity(entries.len());
    for (i, e) in entries.iter().enumerate() {
        if !known.contains(e.frame_id.as_str()) {
            return Err(DatasetError::Referential(format!(
                "detection {i} references unknown frame_id '{}'",
                e.frame_id
            )));
        }
        if !(e.score >= 0.0 && e.score <= 1.0) {
            return Err(DatasetError::Schema(format!(
                "detection {i}: score {} outside [0, 1]",
                e.score
            )));
        }
        records.push(DetectionRecord {
            frame_id: e.frame_id.clone(),
            bbox: bbox_from_array(&format!("detection {i}"), e.bbox)?,
            class: e.class,
            score: e.score,
        });
    }
    records.sort_by(|a, b| a.frame_id.cmp(&b.frame_id));
    Ok(records)
}

/// Serializes detections to the on-disk format.
pub fn write_detections(path: &Path, records: &[DetectionRecord]) -> Result<(), DatasetError> {
    let entries: Vec<DetectionEntry> = records
        .iter()
        .map(|r| DetectionEntry {
            frame_id: r.frame_id.clone(),
            bbox: [r.bbox.u_min, r.bbox.v_min, r.bbox.u_max, r.bbox.v_max],
            class: r.class,
            score: r.score,
        })
        .collect();
    let mut bytes = serde_json::to_vec_pretty(&entries).map_err(|e| DatasetError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    bytes.push(b'\n');
    std::fs::write(path, bytes).map_err(|e| DatasetError::io(path, e))
}
