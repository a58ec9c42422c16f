//! Synthetic RGB-D scene generation with exact ground truth.
//!
//! Spheres are placed without overlap in a configurable depth band and
//! rendered by per-pixel ray casting with a z-buffer; depth encodes the
//! optical-axis z of the nearest hit. Occlusion removes a spherical cap
//! covering the requested fraction of each sphere's surface (a cap of
//! height 2*alpha*r removes exactly fraction alpha); culled pixels fall
//! through to the background, a mask-level analogue of foliage blocking
//! the view. Gaussian noise perturbs every valid depth; a fraction of
//! in-mask depths is replaced by uniform clutter. Ground truth records
//! the exact diameters and the exact projected visibility masks; boxes
//! are the tight lattice boxes of those masks.

use super::EvalError;
use crate::dataset::{
    rle, AnnotatedFruit, DepthMap, Frame, ManifestDoc, ManifestFrame, ManifestFruit,
    ManifestIntrinsics, ManifestMask, Ripeness,
};
use crate::estimators_2d::{BoundingBox, FruitMask};
use crate::geometry::{CameraIntrinsics, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq)]
pub struct SceneSpec {
    pub n_fruits: usize,
    /// Ground-truth diameter band in millimetres.
    pub diameter_range_mm: (f64, f64),
    /// Sphere center depth band in millimetres.
    pub depth_range_mm: (f64, f64),
    pub noise_sigma_mm: f64,
    /// Fraction of each sphere's surface removed by the occlusion cap,
    /// in [0, 0.95].
    pub occlusion_fraction: f64,
    /// Fraction of in-mask depth pixels replaced by uniform clutter.
    pub outlier_fraction: f64,
    pub seed: u64,
    pub image_size: (u32, u32),
    pub focal_length_px: f64,
    /// Millimetres per stored depth unit.
    pub depth_scale: f64,
    /// Depth of a flat background wall; None leaves the background as
    /// invalid depth (0).
    pub background_depth_mm: Option<f64>,
    /// Maximum radial view angle of sphere centers, as tan(angle).
    /// Keeps fruits in the central region where the image-plane length
    /// model `d_r = d_p * z / f` is accurate; far off-axis the
    /// perspective projection stretches silhouettes radially.
    pub max_eccentricity: f64,
    pub frame_id: String,
}

impl Default for SceneSpec {
    fn default() -> Self {
        Self {
            n_fruits: 6,
            diameter_range_mm: (40.0, 95.0),
            depth_range_mm: (1200.0, 2200.0),
            noise_sigma_mm: 0.0,
            occlusion_fraction: 0.0,
            outlier_fraction: 0.0,
            seed: 0,
            image_size: (848, 480),
            focal_length_px: 610.0,
            depth_scale: 0.1,
            background_depth_mm: None,
            max_eccentricity: 0.30,
            frame_id: "synth0000".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticFruitTruth {
    pub fruit_id: String,
    pub center: Point3,
    pub diameter_mm: f64,
    pub ripeness: Ripeness,
}

#[derive(Debug, Clone)]
pub struct SyntheticScene {
    pub frame: Frame,
    pub truths: Vec<SyntheticFruitTruth>,
    rgb: image::RgbImage,
}

struct PlacedSphere {
    center: Point3,
    radius: f64,
    /// Occlusion cap: remove surface with (p - center) . dir > cut.
    occlusion: Option<((f64, f64, f64), f64)>,
    center_px: (f64, f64),
    reserve_px: f64,
    ripeness: Ripeness,
}

fn validate(spec: &SceneSpec) -> Result<(), EvalError> {
    let err = |m: String| Err(EvalError::InvalidScene(m));
    if spec.n_fruits == 0 {
        return err("n_fruits must be at least 1".into());
    }
    let (dlo, dhi) = spec.diameter_range_mm;
    if !(dlo > 0.0 && dhi >= dlo) {
        return err(format!("bad diameter range {:?}", spec.diameter_range_mm));
    }
    let (zlo, zhi) = spec.depth_range_mm;
    if !(zlo > 0.0 && zhi >= zlo && zlo - dhi / 2.0 > 10.0) {
        return err(format!(
            "bad depth range {:?} for diameters up to {dhi}",
            spec.depth_range_mm
        ));
    }
    if !(0.0..=0.95).contains(&spec.occlusion_fraction) {
        return err(format!(
            "occlusion fraction {} outside [0, 0.95]",
            spec.occlusion_fraction
        ));
    }
    if !(0.0..=1.0).contains(&spec.outlier_fraction) {
        return err(format!(
            "outlier fraction {} outside [0, 1]",
            spec.outlier_fraction
        ));
    }
    if spec.noise_sigma_mm < 0.0 {
        return err("negative noise sigma".into());
    }
    if spec.image_size.0 < 32 || spec.image_size.1 < 32 {
        return err(format!("image {:?} too small", spec.image_size));
    }
    if !(spec.focal_length_px > 0.0) || !(spec.depth_scale > 0.0) {
        return err("focal length and depth scale must be positive".into());
    }
    if !(spec.max_eccentricity > 0.0 && spec.max_eccentricity <= 2.0) {
        return err(format!(
            "max eccentricity {} outside (0, 2]",
            spec.max_eccentricity
        ));
    }
    let deepest = spec
        .background_depth_mm
        .unwrap_or(0.0)
        .max(1.5 * zhi)
        + 8.0 * spec.noise_sigma_mm;
    if deepest / spec.depth_scale > 65000.0 {
        return err(format!(
            "depth values up to {deepest} mm do not fit 16 bits at scale {}",
            spec.depth_scale
        ));
    }
    Ok(())
}

fn place_spheres(spec: &SceneSpec, rng: &mut ChaCha8Rng) -> Result<Vec<PlacedSphere>, EvalError> {
    let (width, height) = (spec.image_size.0 as f64, spec.image_size.1 as f64);
    let (u0, v0) = (width / 2.0, height / 2.0);
    let f = spec.focal_length_px;
    let max_attempts = 300 * spec.n_fruits;
    let mut placed: Vec<PlacedSphere> = Vec::with_capacity(spec.n_fruits);
    let mut attempts = 0;

    while placed.len() < spec.n_fruits {
        attempts += 1;
        if attempts > max_attempts {
            return Err(EvalError::Placement {
                requested: spec.n_fruits,
                attempts: max_attempts,
            });
        }
        let cz = rng.gen_range(spec.depth_range_mm.0..=spec.depth_range_mm.1);
        let diameter = rng.gen_range(spec.diameter_range_mm.0..=spec.diameter_range_mm.1);
        let r = diameter / 2.0;
        // Conservative projected radius: nearest-depth scaling plus an
        // eccentricity allowance applied after the pixel is drawn.
        let base_reserve = f * r / (cz - r);
        if base_reserve < 4.0 {
            continue; // too small to rasterize meaningfully
        }
        let margin = base_reserve * 1.35 + 4.0;
        if 2.0 * margin + 8.0 > width.min(height) {
            continue; // cannot fit at this depth/size
        }
        let cu = rng.gen_range(margin..width - 1.0 - margin);
        let cv = rng.gen_range(margin..height - 1.0 - margin);
        let ecc = ((cu - u0) / f).hypot((cv - v0) / f);
        if ecc > spec.max_eccentricity {
            continue;
        }
        let reserve = base_reserve * (1.0 + ecc * ecc) + 3.0;
        if placed.iter().any(|s| {
            let d = (s.center_px.0 - cu).hypot(s.center_px.1 - cv);
            d < s.reserve_px + reserve + 2.0
        }) {
            continue;
        }
        let center = Point3::new((cu - u0) * cz / f, (cv - v0) * cz / f, cz);
        let ripeness = if rng.gen_bool(0.5) {
            Ripeness::Ripe
        } else {
            Ripeness::Unripe
        };
        let occlusion = if spec.occlusion_fraction > 0.0 {
            let dir = loop {
                let v = (
                    rng.gen_range(-1.0f64..1.0),
                    rng.gen_range(-1.0f64..1.0),
                    rng.gen_range(-1.0f64..1.0),
                );
                let n = (v.0 * v.0 + v.1 * v.1 + v.2 * v.2).sqrt();
                if n > 1e-3 && n <= 1.0 {
                    break (v.0 / n, v.1 / n, v.2 / n);
                }
            };
            Some((dir, (1.0 - 2.0 * spec.occlusion_fraction) * r))
        } else {
            None
        };
        placed.push(PlacedSphere {
            center,
            radius: r,
            occlusion,
            center_px: (cu, cv),
            reserve_px: reserve,
            ripeness,
        });
    }
    Ok(placed)
}

pub fn generate_synthetic_scene(spec: &SceneSpec) -> Result<SyntheticScene, EvalError> {
    validate(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let spheres = place_spheres(spec, &mut rng)?;

    let (width, height) = spec.image_size;
    let (u0, v0) = (width as f64 / 2.0, height as f64 / 2.0);
    let f = spec.focal_length_px;
    let n_px = width as usize * height as usize;

    let background = spec.background_depth_mm.unwrap_or(f64::INFINITY);
    let mut depth_mm = vec![background; n_px];
    let mut owner = vec![-1i32; n_px];
    let mut shade = vec![0.0f64; n_px];

    for (k, sphere) in spheres.iter().enumerate() {
        let bound = sphere.reserve_px.ceil() as i64;
        let (cu, cv) = (sphere.center_px.0.round() as i64, sphere.center_px.1.round() as i64);
        let c = sphere.center;
        let r = sphere.radius;
        for v in (cv - bound).max(0)..=(cv + bound).min(height as i64 - 1) {
            for u in (cu - bound).max(0)..=(cu + bound).min(width as i64 - 1) {
                let dx = (u as f64 - u0) / f;
                let dy = (v as f64 - v0) / f;
                let d_sq = dx * dx + dy * dy + 1.0;
                let dc = dx * c.x + dy * c.y + c.z;
                let disc = dc * dc - d_sq * (c.x * c.x + c.y * c.y + c.z * c.z - r * r);
                if disc < 0.0 {
                    continue;
                }
                let t = (dc - disc.sqrt()) / d_sq;
                if t <= 0.0 {
                    continue;
                }
                let p = Point3::new(t * dx, t * dy, t);
                if let Some((dir, cut)) = sphere.occlusion {
                    let dot = (p.x - c.x) * dir.0 + (p.y - c.y) * dir.1 + (p.z - c.z) * dir.2;
                    if dot > cut {
                        continue; // removed cap: falls through to background
                    }
                }
                let idx = v as usize * width as usize + u as usize;
                if t < depth_mm[idx] {
                    depth_mm[idx] = t;
                    owner[idx] = k as i32;
                    shade[idx] = ((c.z - p.z) / r).clamp(0.0, 1.0);
                }
            }
        }
    }

    // Exact projected visibility masks, before any depth corruption.
    let mut mask_pixels: Vec<Vec<(i32, i32)>> = vec![Vec::new(); spheres.len()];
    for idx in 0..n_px {
        if owner[idx] >= 0 {
            let u = (idx % width as usize) as i32;
            let v = (idx / width as usize) as i32;
            mask_pixels[owner[idx] as usize].push((u, v));
        }
    }

    // Depth corruption: Gaussian noise on every valid pixel, then
    // uniform clutter replacing a fraction of in-mask depths.
    if spec.noise_sigma_mm > 0.0 {
        let normal = Normal::new(0.0, spec.noise_sigma_mm).expect("valid sigma");
        for z in depth_mm.iter_mut() {
            if z.is_finite() {
                *z = (*z + normal.sample(&mut rng)).max(1.0);
            }
        }
    }
    if spec.outlier_fraction > 0.0 {
        let clutter_lo = 0.5 * spec.depth_range_mm.0;
        let clutter_hi = 1.5 * spec.depth_range_mm.1;
        for pixels in &mask_pixels {
            for &(u, v) in pixels {
                if rng.gen_bool(spec.outlier_fraction) {
                    let idx = v as usize * width as usize + u as usize;
                    depth_mm[idx] = rng.gen_range(clutter_lo..clutter_hi);
                }
            }
        }
    }

    // Quantize to the 16-bit raster convention (0 = invalid).
    let depth_raw: Vec<u16> = depth_mm
        .iter()
        .map(|&z| {
            if z.is_finite() {
                (z / spec.depth_scale).round().clamp(1.0, 65535.0) as u16
            } else {
                0
            }
        })
        .collect();

    // Shaded RGB rendering: cosmetic, estimators never read it.
    let mut rgb = image::RgbImage::new(width, height);
    for (idx, pixel) in rgb.pixels_mut().enumerate() {
        *pixel = if owner[idx] >= 0 {
            let val = 70.0 + 180.0 * shade[idx];
            match spheres[owner[idx] as usize].ripeness {
                Ripeness::Ripe => image::Rgb([val as u8, (val * 0.22) as u8, (val * 0.18) as u8]),
                Ripeness::Unripe => {
                    image::Rgb([(val * 0.35) as u8, val as u8, (val * 0.25) as u8])
                }
            }
        } else if depth_raw[idx] != 0 {
            image::Rgb([52, 54, 48])
        } else {
            image::Rgb([26, 26, 28])
        };
    }

    let mut fruits = Vec::with_capacity(spheres.len());
    let mut truths = Vec::with_capacity(spheres.len());
    for (k, sphere) in spheres.iter().enumerate() {
        let fruit_id = format!("{}-fruit{k:03}", spec.frame_id);
        let mask = FruitMask::new(mask_pixels[k].clone()).map_err(|_| EvalError::Placement {
            requested: spec.n_fruits,
            attempts: 0,
        })?;
        let (mu_min, mv_min, mu_max, mv_max) = mask.extent();
        if mu_max <= mu_min || mv_max <= mv_min || mask.len() < 4 {
            return Err(EvalError::InvalidScene(format!(
                "fruit {fruit_id} rasterized to a degenerate {} px mask; enlarge the fruits or image",
                mask.len()
            )));
        }
        let bbox = BoundingBox::new(
            mu_min as f64,
            mv_min as f64,
            mu_max as f64,
            mv_max as f64,
        )
        .expect("non-degenerate extent");
        fruits.push(AnnotatedFruit {
            fruit_id: fruit_id.clone(),
            bbox,
            mask: Some(mask),
            ripeness: sphere.ripeness,
            gt_diameter_mm: Some(2.0 * sphere.radius),
        });
        truths.push(SyntheticFruitTruth {
            fruit_id,
            center: sphere.center,
            diameter_mm: 2.0 * sphere.radius,
            ripeness: sphere.ripeness,
        });
    }

    let intrinsics = CameraIntrinsics::new(f, (u0, v0), spec.depth_scale)
        .map_err(|e| EvalError::InvalidScene(e.to_string()))?;
    let frame = Frame {
        frame_id: spec.frame_id.clone(),
        width,
        height,
        depth: DepthMap::new(width, height, depth_raw)
            .map_err(|e| EvalError::InvalidScene(e.to_string()))?,
        intrinsics,
        fruits,
        capture_date: None,
        rgb_path: PathBuf::from(format!("rgb/{}.png", spec.frame_id)),
        depth_path: PathBuf::from(format!("depth/{}.png", spec.frame_id)),
    };
    Ok(SyntheticScene {
        frame,
        truths,
        rgb,
    })
}

impl SyntheticScene {
    /// Writes rasters and manifest under `dir`; returns the manifest path.
    pub fn write(&self, dir: &Path) -> Result<PathBuf, EvalError> {
        std::fs::create_dir_all(dir.join("rgb")).map_err(|e| EvalError::Io(e.to_string()))?;
        std::fs::create_dir_all(dir.join("depth")).map_err(|e| EvalError::Io(e.to_string()))?;

        let rgb_rel = format!("rgb/{}.png", self.frame.frame_id);
        let depth_rel = format!("depth/{}.png", self.frame.frame_id);
        self.rgb
            .save(dir.join(&rgb_rel))
            .map_err(|e| EvalError::Io(e.to_string()))?;
        let depth_img = image::ImageBuffer::<image::Luma<u16>, Vec<u16>>::from_raw(
            self.frame.width,
            self.frame.height,
            self.frame.depth.raw().to_vec(),
        )
        .expect("depth buffer matches dimensions");
        depth_img
            .save(dir.join(&depth_rel))
            .map_err(|e| EvalError::Io(e.to_string()))?;

        let fruits = self
            .frame
            .fruits
            .iter()
            .map(|fruit| {
                let mask = fruit.mask.as_ref().expect("synthetic fruits carry masks");
                Ok(ManifestFruit {
                    fruit_id: fruit.fruit_id.clone(),
                    bbox: [
                        fruit.bbox.u_min,
                        fruit.bbox.v_min,
                        fruit.bbox.u_max,
                        fruit.bbox.v_max,
                    ],
                    ripeness: fruit.ripeness,
                    gt_diameter_mm: fruit.gt_diameter_mm,
                    mask: Some(ManifestMask {
                        rle: Some(
                            rle::encode(mask.pixels())
                                .map_err(|e| EvalError::Io(e.to_string()))?,
                        ),
                        path: None,
                    }),
                })
            })
            .collect::<Result<Vec<_>, EvalError>>()?;

        let doc = ManifestDoc {
            schema_version: 1,
            frames: vec![ManifestFrame {
                frame_id: self.frame.frame_id.clone(),
                rgb: rgb_rel,
                depth: depth_rel,
                intrinsics: ManifestIntrinsics {
                    focal_length_px: self.frame.intrinsics.focal_length_px,
                    principal_point: self.frame.intrinsics.principal_point,
                    depth_scale: self.frame.intrinsics.depth_scale,
                },
                capture_date: None,
                fruits,
            }],
        };
        let manifest_path = dir.join("manifest.json");
        crate::dataset::write_manifest(&manifest_path, &doc)
            .map_err(|e| EvalError::Io(e.to_string()))?;
        Ok(manifest_path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators_2d::estimate_2d_lseg;
    use crate::estimators_3d::{estimate_3d_lseg, lsq_sphere_fit};
    use crate::filtering::{filter_by_depth_percentile, mean_depth, RetentionRange};
    use crate::geometry::{back_project, pixel_to_metric, Pixel};
    use tempfile::TempDir;

    fn clean_single_fruit_spec(seed: u64) -> SceneSpec {
        SceneSpec {
            n_fruits: 1,
            diameter_range_mm: (76.0, 76.0),
            depth_range_mm: (1000.0, 1000.0),
            seed,
            frame_id: "synth-test".into(),
            ..SceneSpec::default()
        }
    }

    fn mask_depth_pixels(scene: &SyntheticScene, fruit_idx: usize) -> Vec<Pixel> {
        let frame = &scene.frame;
        let fruit = &frame.fruits[fruit_idx];
        fruit
            .mask
            .as_ref()
            .unwrap()
            .pixels()
            .iter()
            .filter_map(|&(u, v)| {
                frame
                    .depth
                    .depth_mm(u as i64, v as i64, frame.intrinsics.depth_scale)
                    .map(|z| Pixel::new(u as f64, v as f64, z))
            })
            .collect()
    }

    #[test]
    fn clean_sphere_lseg2d_recovers_diameter_within_one_pixel() {
        let scene = generate_synthetic_scene(&clean_single_fruit_spec(7)).unwrap();
        let frame = &scene.frame;
        let fruit = &frame.fruits[0];
        let pixels = mask_depth_pixels(&scene, 0);
        let zbar = mean_depth(&pixels).unwrap();
        let d_p = estimate_2d_lseg(fruit.mask.as_ref().unwrap());
        let d_est = pixel_to_metric(d_p, zbar, &frame.intrinsics).unwrap();
        let px_equivalent = zbar / frame.intrinsics.focal_length_px;
        let err = (d_est - 76.0).abs();
        assert!(
            err < px_equivalent,
            "error {err} mm exceeds one pixel equivalent {px_equivalent} mm"
        );
    }

    #[test]
    fn same_seed_is_bit_identical_on_disk() {
        let spec = SceneSpec {
            n_fruits: 4,
            noise_sigma_mm: 3.0,
            occlusion_fraction: 0.25,
            outlier_fraction: 0.1,
            seed: 42,
            ..SceneSpec::default()
        };
        let a = generate_synthetic_scene(&spec).unwrap();
        let b = generate_synthetic_scene(&spec).unwrap();
        assert_eq!(a.frame.depth.raw(), b.frame.depth.raw());
        assert_eq!(a.truths, b.truths);

        let dir_a = TempDir::new().unwrap();
        let dir_b = TempDir::new().unwrap();
        a.write(dir_a.path()).unwrap();
        b.write(dir_b.path()).unwrap();
        for rel in [
            "manifest.json".to_string(),
            format!("rgb/{}.png", a.frame.frame_id),
            format!("depth/{}.png", a.frame.frame_id),
        ] {
            let bytes_a = std::fs::read(dir_a.path().join(&rel)).unwrap();
            let bytes_b = std::fs::read(dir_b.path().join(&rel)).unwrap();
            assert_eq!(bytes_a, bytes_b, "{rel} differs between runs");
        }
    }

    #[test]
    fn different_seed_changes_the_scene() {
        let a = generate_synthetic_scene(&clean_single_fruit_spec(1)).unwrap();
        let b = generate_synthetic_scene(&clean_single_fruit_spec(2)).unwrap();
        assert_ne!(a.frame.depth.raw(), b.frame.depth.raw());
    }

    #[test]
    fn half_occlusion_keeps_lsq_exact_and_shrinks_nothing_beyond_diameter() {
        let spec = SceneSpec {
            occlusion_fraction: 0.5,
            ..clean_single_fruit_spec(11)
        };
        let scene = generate_synthetic_scene(&spec).unwrap();
        let frame = &scene.frame;
        let full = generate_synthetic_scene(&clean_single_fruit_spec(11)).unwrap();
        // The visible cap subtends half the sphere: mask area shrinks.
        let occluded_px = frame.fruits[0].mask.as_ref().unwrap().len();
        let full_px = full.frame.fruits[0].mask.as_ref().unwrap().len();
        assert!(
            occluded_px < full_px,
            "occluded mask {occluded_px} px not smaller than full {full_px} px"
        );

        let pixels = mask_depth_pixels(&scene, 0);
        let kept = filter_by_depth_percentile(&pixels, RetentionRange::full()).unwrap();
        let cloud = back_project(&frame.fruits[0].fruit_id, &kept, &frame.intrinsics).unwrap();
        // Noise-free: the sphere fit stays exact up to depth quantization.
        let fit = lsq_sphere_fit(&cloud).unwrap();
        assert!(
            (fit.diameter() - 76.0).abs() < 0.5,
            "lsq diameter {}",
            fit.diameter()
        );
        // The largest visible segment cannot exceed the true diameter.
        let lseg = estimate_3d_lseg(&cloud).unwrap();
        assert!(lseg < 76.0 + 0.5);
        assert!(lseg > 40.0, "visible cap should still span a large chord");
    }

    #[test]
    fn impossible_placement_errors_out() {
        let spec = SceneSpec {
            n_fruits: 400,
            diameter_range_mm: (95.0, 95.0),
            depth_range_mm: (600.0, 700.0),
            image_size: (128, 96),
            ..SceneSpec::default()
        };
        assert!(matches!(
            generate_synthetic_scene(&spec),
            Err(EvalError::Placement { .. })
        ));
    }

    #[test]
    fn background_wall_fills_non_fruit_pixels() {
        let spec = SceneSpec {
            background_depth_mm: Some(1500.0),
            ..clean_single_fruit_spec(3)
        };
        let scene = generate_synthetic_scene(&spec).unwrap();
        let z = scene.frame.depth.depth_mm(0, 0, spec.depth_scale);
        assert_eq!(z, Some(1500.0));
    }

    #[test]
    fn written_scene_loads_with_identical_content() {
        let spec = SceneSpec {
            n_fruits: 3,
            occlusion_fraction: 0.2,
            seed: 21,
            frame_id: "rt".into(),
            ..SceneSpec::default()
        };
        let scene = generate_synthetic_scene(&spec).unwrap();
        let dir = TempDir::new().unwrap();
        let manifest = scene.write(dir.path()).unwrap();
        let frames = crate::dataset::load_manifest(&manifest).unwrap();
        assert_eq!(frames.len(), 1);
        let loaded = &frames[0];
        assert_eq!(loaded.frame_id, scene.frame.frame_id);
        assert_eq!(loaded.depth.raw(), scene.frame.depth.raw());
        assert_eq!(loaded.fruits.len(), scene.frame.fruits.len());
        for (a, b) in loaded.fruits.iter().zip(&scene.frame.fruits) {
            assert_eq!(a, b);
        }
        assert_eq!(loaded.intrinsics, scene.frame.intrinsics);
    }
}
