//! Best-effort converters from the two public orchard datasets' layouts
//! into the neutral manifest. These are convenience importers, not core
//! functionality: they expect the directory layout documented in the
//! README (images/, depth/, optional masks/, annotations.csv) and fail
//! with explicit errors when the layout does not match. Camera
//! intrinsics are never assumed; they must be supplied by the caller.

use super::{
    write_manifest, DatasetError, ManifestDoc, ManifestFrame, ManifestFruit, ManifestIntrinsics,
    ManifestMask, Ripeness,
};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// Caller-supplied intrinsics for an imported dataset.
#[derive(Debug, Clone, Copy)]
pub struct ImportIntrinsics {
    pub focal_length_px: f64,
    /// Defaults to the image center when absent.
    pub principal_point: Option<(f64, f64)>,
    pub depth_scale: f64,
}

/// How to assign ripeness labels to imported fruits.
#[derive(Debug, Clone, Default)]
pub struct RipenessRule {
    /// capture_date -> class, e.g. "2020-07-16" -> Unripe.
    pub by_date: BTreeMap<String, Ripeness>,
    /// Fallback when the date is unmapped or absent.
    pub default: Option<Ripeness>,
}

impl RipenessRule {
    fn resolve(&self, date: Option<&str>, row: usize) -> Result<Ripeness, DatasetError> {
        if let Some(d) = date {
            if let Some(&r) = self.by_date.get(d) {
                return Ok(r);
            }
        }
        self.default.ok_or_else(|| {
            DatasetError::Schema(format!(
                "row {row}: no ripeness rule matches date {date:?} and no default class given"
            ))
        })
    }
}

#[derive(Debug)]
struct AnnotationRow {
    image: String,
    fruit_id: String,
    bbox: [f64; 4],
    mask: Option<String>,
    diameter_mm: Option<f64>,
    date: Option<String>,
}

fn read_annotation_csv(path: &Path, expect_masks: bool) -> Result<Vec<AnnotationRow>, DatasetError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| DatasetError::Schema(format!("cannot read {}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| DatasetError::Schema(format!("{}: {e}", path.display())))?
        .clone();
    let col = |name: &str| headers.iter().position(|h| h.eq_ignore_ascii_case(name));
    let required = |name: &str| {
        col(name).ok_or_else(|| {
            DatasetError::Schema(format!(
                "{}: missing required column '{name}' (have: {})",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let image_col = required("image")?;
    let id_col = required("apple_id")?;
    let boxes = [
        required("u_min")?,
        required("v_min")?,
        required("u_max")?,
        required("v_max")?,
    ];
    let mask_col = if expect_masks {
        Some(required("mask")?)
    } else {
        col("mask")
    };
    let diameter_col = col("diameter_mm");
    let date_col = col("date");

    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record
            .map_err(|e| DatasetError::Schema(format!("{} row {i}: {e}", path.display())))?;
        let field = |c: usize| record.get(c).unwrap_or("").to_string();
        let parse_f64 = |c: usize| -> Result<f64, DatasetError> {
            field(c).parse().map_err(|_| {
                DatasetError::Schema(format!(
                    "{} row {i}: '{}' is not a number",
                    path.display(),
                    field(c)
                ))
            })
        };
        let diameter_mm = match diameter_col {
            Some(c) if !field(c).is_empty() => Some(parse_f64(c)?),
            _ => None,
        };
        rows.push(AnnotationRow {
            image: field(image_col),
            fruit_id: field(id_col),
            bbox: [
                parse_f64(boxes[0])?,
                parse_f64(boxes[1])?,
                parse_f64(boxes[2])?,
                parse_f64(boxes[3])?,
            ],
            mask: mask_col.map(&field).filter(|m| !m.is_empty()),
            diameter_mm,
            date: date_col.map(&field).filter(|d| !d.is_empty()),
        });
    }
    Ok(rows)
}

fn find_raster(dir: &Path, stem: &str) -> Option<PathBuf> {
    for ext in ["png", "PNG", "jpg", "jpeg", "JPG"] {
        let p = dir.join(format!("{stem}.{ext}"));
        if p.exists() {
            return Some(p);
        }
    }
    None
}

fn convert(
    src: &Path,
    out_dir: &Path,
    intrinsics: ImportIntrinsics,
    ripeness: &RipenessRule,
    expect_masks: bool,
) -> Result<PathBuf, DatasetError> {
    let csv_path = src.join("annotations.csv");
    if !csv_path.exists() {
        return Err(DatasetError::Schema(format!(
            "expected annotation file {}",
            csv_path.display()
        )));
    }
    let rows = read_annotation_csv(&csv_path, expect_masks)?;

    // Group rows by image, keeping first-appearance order.
    let mut order: Vec<String> = Vec::new();
    let mut by_image: BTreeMap<String, Vec<&AnnotationRow>> = BTreeMap::new();
    for row in &rows {
        if !by_image.contains_key(&row.image) {
            order.push(row.image.clone());
        }
        by_image.entry(row.image.clone()).or_default().push(row);
    }

    let mut frames = Vec::new();
    for image in &order {
        let rgb_path = find_raster(&src.join("images"), image).ok_or_else(|| {
            DatasetError::MissingRaster {
                frame_id: image.clone(),
                path: src.join("images").join(image),
            }
        })?;
        let depth_path = find_raster(&src.join("depth"), image).ok_or_else(|| {
            DatasetError::MissingRaster {
                frame_id: image.clone(),
                path: src.join("depth").join(image),
            }
        })?;
        let dims = image::image_dimensions(&rgb_path).map_err(|e| DatasetError::Raster {
            frame_id: image.clone(),
            path: rgb_path.clone(),
            message: e.to_string(),
        })?;
        let principal_point = intrinsics
            .principal_point
            .unwrap_or((dims.0 as f64 / 2.0, dims.1 as f64 / 2.0));

        let mut fruits = Vec::new();
        let mut date: Option<String> = None;
        for (k, row) in by_image[image].iter().enumerate() {
            date = date.or_else(|| row.date.clone());
            let class = ripeness.resolve(row.date.as_deref(), k)?;
            let mask = match &row.mask {
                None => None,
                Some(rel) => {
                    let mask_abs = src.join(rel);
                    if !mask_abs.exists() {
                        return Err(DatasetError::Mask {
                            fruit_id: row.fruit_id.clone(),
                            message: format!("mask raster {} does not exist", mask_abs.display()),
                        });
                    }
                    Some(ManifestMask {
                        rle: None,
                        path: Some(mask_abs.to_string_lossy().into_owned()),
                    })
                }
            };
            fruits.push(ManifestFruit {
                fruit_id: format!("{image}_{}", row.fruit_id),
                bbox: row.bbox,
                ripeness: class,
                gt_diameter_mm: row.diameter_mm,
                mask,
            });
        }
        frames.push(ManifestFrame {
            frame_id: image.clone(),
            rgb: rgb_path.to_string_lossy().into_owned(),
            depth: depth_path.to_string_lossy().into_owned(),
            intrinsics: ManifestIntrinsics {
                focal_length_px: intrinsics.focal_length_px,
                principal_point,
                depth_scale: intrinsics.depth_scale,
            },
            capture_date: date,
            fruits,
        });
    }

    std::fs::create_dir_all(out_dir).map_err(|e| DatasetError::io(out_dir, e))?;
    let manifest_path = out_dir.join("manifest.json");
    write_manifest(
        &manifest_path,
        &ManifestDoc {
            schema_version: 1,
            frames,
        },
    )?;
    Ok(manifest_path)
}

/// Imports a planar-cordon orchard dataset layout: box annotations only,
/// no masks. See the README for the expected directory structure.
pub fn import_openaccess(
    src: &Path,
    out_dir: &Path,
    intrinsics: ImportIntrinsics,
    ripeness: &RipenessRule,
) -> Result<PathBuf, DatasetError> {
    convert(src, out_dir, intrinsics, ripeness, false)
}

/// Imports a cropped-image dataset layout with per-fruit modal mask
/// rasters referenced from the annotation file.
pub fn import_amodal(
    src: &Path,
    out_dir: &Path,
    intrinsics: ImportIntrinsics,
    ripeness: &RipenessRule,
) -> Result<PathBuf, DatasetError> {
    convert(src, out_dir, intrinsics, ripeness, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_manifest;
    use tempfile::TempDir;

    fn write_fixture(dir: &Path, with_masks: bool) {
        std::fs::create_dir_all(dir.join("images")).unwrap();
        std::fs::create_dir_all(dir.join("depth")).unwrap();
        let rgb = image::RgbImage::from_pixel(60, 40, image::Rgb([10, 60, 10]));
        rgb.save(dir.join("images/frame_a.png")).unwrap();
        let depth = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_pixel(
            60,
            40,
            image::Luma([900]),
        );
        depth.save(dir.join("depth/frame_a.png")).unwrap();

        let mut csv = String::from("image,apple_id,u_min,v_min,u_max,v_max,diameter_mm,date");
        if with_masks {
            csv = String::from("image,apple_id,u_min,v_min,u_max,v_max,mask,diameter_mm,date");
        }
        csv.push('\n');
        if with_masks {
            std::fs::create_dir_all(dir.join("masks")).unwrap();
            let mut mask = image::GrayImage::new(60, 40);
            for v in 12..18 {
                for u in 22..28 {
                    mask.put_pixel(u, v, image::Luma([255]));
                }
            }
            mask.save(dir.join("masks/frame_a_0.png")).unwrap();
            csv.push_str("frame_a,0,20,10,30,20,mask=unused,62.5,2018-10-03\n");
            // fix the mask column content
            csv = csv.replace("mask=unused", "masks/frame_a_0.png");
        } else {
            csv.push_str("frame_a,0,20,10,30,20,62.5,2018-10-03\n");
            csv.push_str("frame_a,1,40,25,50,35,,2018-10-03\n");
        }
        std::fs::write(dir.join("annotations.csv"), csv).unwrap();
    }

    fn intr() -> ImportIntrinsics {
        ImportIntrinsics {
            focal_length_px: 610.0,
            principal_point: None,
            depth_scale: 1.0,
        }
    }

    #[test]
    fn openaccess_fixture_imports_and_loads() {
        let src = TempDir::new().unwrap();
        let out = TempDir::new().unwrap();
        write_fixture(src.path(), false);
        let rule = RipenessRule {
            by_date: BTreeMap::from([("2018-10-03".to_string(), Ripeness::Ripe)]),
            default: None,
        };
        let manifest = import_openaccess(src.path(), out.path(), intr(), &rule).unwrap();
        let frames = load_manifest(&manifest).unwrap();
        assert_eq!(frames.len(), 1);
        assert_eq!(frames[0].fruits.len(), 2);
        assert_eq!(frames[0].fruits[0].ripeness, Ripeness::Ripe);
        assert_eq!(frames[0].fruits[0].gt_diameter_mm, Some(62.5));
        assert_eq!(frames[0].fruits[1].gt_diameter_mm, None);
        assert_eq!(frames[0].capture_date.as_deref(), Some("2018-10-03"));
    }

    #[test]
    fn amodal_fixture_imports_masks() {
        let src = TempDir::new().unwrap();
        let out = TempDir::new().unwrap();
        write_fixture(src.path(), true);
        let rule = RipenessRule {
            by_date: BTreeMap::new(),
            default: Some(Ripeness::Unripe),
        };
        let manifest = import_amodal(src.path(), out.path(), intr(), &rule).unwrap();
        let frames = load_manifest(&manifest).unwrap();
        let mask = frames[0].fruits[0].mask.as_ref().expect("mask imported");
        assert_eq!(mask.len(), 36);
        assert_eq!(mask.extent(), (22, 12, 27, 17));
    }

    #[test]
    fn missing_ripeness_rule_is_an_error() {
        let src = TempDir::new().unwrap();
        let out = TempDir::new().unwrap();
        write_fixture(src.path(), false);
        let rule = RipenessRule::default();
        assert!(matches!(
            import_openaccess(src.path(), out.path(), intr(), &rule),
            Err(DatasetError::Schema(_))
        ));
    }

    #[test]
    fn missing_annotations_file_is_an_error() {
        let src = TempDir::new().unwrap();
        let out = TempDir::new().unwrap();
        assert!(matches!(
            import_openaccess(src.path(), out.path(), intr(), &RipenessRule::default()),
            Err(DatasetError::Schema(_))
        ));
    }
}
