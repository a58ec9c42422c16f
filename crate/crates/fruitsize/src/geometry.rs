//! Pinhole camera model: pixel/metric scaling and depth-map back-projection.
//!
//! All metric quantities are millimetres in the camera frame (x right,
//! y down, z forward along the optical axis). Depth maps are assumed to
//! encode optical-axis depth, the convention of aligned RGB-D sensors,
//! not Euclidean ray distance.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("focal length must be positive, got {0}")]
    InvalidFocalLength(f64),
    #[error("depth scale must be positive, got {0}")]
    InvalidDepthScale(f64),
    #[error("pixel length must be non-negative, got {0}")]
    NegativePixelLength(f64),
    #[error("mean depth must be positive, got {0}")]
    NonPositiveMeanDepth(f64),
    #[error("pixel {index} has non-positive depth {z}")]
    InvalidDepth { index: usize, z: f64 },
    #[error("point has non-positive z component {0}")]
    NonPositiveZ(f64),
}

/// Intrinsic parameters of a pinhole camera with a single focal length.
///
/// `depth_scale` converts stored depth-raster units to millimetres
/// (e.g. 0.1 for a sensor that stores tenths of a millimetre).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraIntrinsics {
    pub focal_length_px: f64,
    /// Principal point (u0, v0) in pixels. Setting it to (0, 0) makes
    /// `u`, `v` plain offsets from the image origin.
    pub principal_point: (f64, f64),
    pub depth_scale: f64,
}

impl CameraIntrinsics {
    pub fn new(
        focal_length_px: f64,
        principal_point: (f64, f64),
        depth_scale: f64,
    ) -> Result<Self, GeometryError> {
        if !(focal_length_px > 0.0) {
            return Err(GeometryError::InvalidFocalLength(focal_length_px));
        }
        if !(depth_scale > 0.0) {
            return Err(GeometryError::InvalidDepthScale(depth_scale));
        }
        Ok(Self {
            focal_length_px,
            principal_point,
            depth_scale,
        })
    }
}

/// An image-plane sample with metric depth. `z` is in millimetres, after
/// the intrinsics' depth scale has been applied; `z = 0` marks invalid
/// depth and must be filtered out before any estimator sees the pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pixel {
    /// Column coordinate in pixels.
    pub u: f64,
    /// Row coordinate in pixels.
    pub v: f64,
    /// Depth in millimetres.
    pub z: f64,
}

impl Pixel {
    pub fn new(u: f64, v: f64, z: f64) -> Self {
        Self { u, v, z }
    }
}

/// A point in the camera frame, millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_squared(&self, other: &Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        dx * dx + dy * dy + dz * dz
    }

    pub fn distance(&self, other: &Point3) -> f64 {
        self.distance_squared(other).sqrt()
    }
}

/// Point cloud of a single fruit, back-projected from its masked depth
/// pixels after outlier removal.
#[derive(Debug, Clone, PartialEq)]
pub struct FruitPointCloud {
    pub fruit_id: String,
    pub points: Vec<Point3>,
}

impl FruitPointCloud {
    pub fn new(fruit_id: impl Into<String>, points: Vec<Point3>) -> Self {
        Self {
            fruit_id: fruit_id.into(),
            points,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Converts an image-plane length to a metric length: `d_r = d_p * z / f`
/// where `z` is the mean fruit depth and `f` the focal length.
pub fn pixel_to_metric(
    d_p: f64,
    mean_depth: f64,
    intrinsics: &CameraIntrinsics,
) -> Result<f64, GeometryError> {
    if !(d_p >= 0.0) {
        return Err(GeometryError::NegativePixelLength(d_p));
    }
    if !(mean_depth > 0.0) {
        return Err(GeometryError::NonPositiveMeanDepth(mean_depth));
    }
    Ok(d_p * mean_depth / intrinsics.focal_length_px)
}

/// Back-projects depth pixels into the camera frame:
/// `x = (u - u0) * z / f`, `y = (v - v0) * z / f`, `z` unchanged.
///
/// Output order matches input order. Any pixel with `z <= 0` is an error
/// naming the offending index.
pub fn back_project(
    fruit_id: &str,
    pixels: &[Pixel],
    intrinsics: &CameraIntrinsics,
) -> Result<FruitPointCloud, GeometryError> {
    let f = intrinsics.focal_length_px;
    let (u0, v0) = intrinsics.principal_point;
    let mut points = Vec::with_capacity(pixels.len());
    for (index, p) in pixels.iter().enumerate() {
        if !(p.z > 0.0) {
            return Err(GeometryError::InvalidDepth { index, z: p.z });
        }
        points.push(Point3::new(
            (p.u - u0) * p.z / f,
            (p.v - v0) * p.z / f,
            p.z,
        ));
    }
    Ok(FruitPointCloud::new(fruit_id, points))
}

/// Projects a camera-frame point back onto the image plane. Inverse of
/// [`back_project`] up to floating-point rounding.
pub fn project(point: &Point3, intrinsics: &CameraIntrinsics) -> Result<Pixel, GeometryError> {
    if !(point.z > 0.0) {
        return Err(GeometryError::NonPositiveZ(point.z));
    }
    let f = intrinsics.focal_length_px;
    let (u0, v0) = intrinsics.principal_point;
    Ok(Pixel::new(
        point.x * f / point.z + u0,
        point.y * f / point.z + v0,
        point.z,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn intr(f: f64, pp: (f64, f64)) -> CameraIntrinsics {
        CameraIntrinsics::new(f, pp, 1.0).unwrap()
    }

    #[test]
    fn intrinsics_reject_bad_params() {
        assert!(CameraIntrinsics::new(0.0, (0.0, 0.0), 1.0).is_err());
        assert!(CameraIntrinsics::new(-5.0, (0.0, 0.0), 1.0).is_err());
        assert!(CameraIntrinsics::new(600.0, (0.0, 0.0), 0.0).is_err());
        assert!(CameraIntrinsics::new(600.0, (0.0, 0.0), -1.0).is_err());
    }

    #[test]
    fn pixel_to_metric_zero_length() {
        let c = intr(500.0, (0.0, 0.0));
        assert_eq!(pixel_to_metric(0.0, 1000.0, &c).unwrap(), 0.0);
    }

    #[test]
    fn pixel_to_metric_identity_at_focal_length() {
        // d_p = f maps to exactly z for any z > 0.
        for z in [1.0, 330.0, 1500.0, 2999.5] {
            let c = intr(613.7, (12.0, -4.0));
            assert_eq!(pixel_to_metric(613.7, z, &c).unwrap(), z);
        }
    }

    #[test]
    fn pixel_to_metric_hand_value() {
        // 40 px at 1500 mm with f = 600 -> 40 * 1500 / 600 = 100 mm.
        let c = intr(600.0, (0.0, 0.0));
        assert_eq!(pixel_to_metric(40.0, 1500.0, &c).unwrap(), 100.0);
    }

    #[test]
    fn pixel_to_metric_rejects_bad_inputs() {
        let c = intr(600.0, (0.0, 0.0));
        assert!(matches!(
            pixel_to_metric(10.0, 0.0, &c),
            Err(GeometryError::NonPositiveMeanDepth(_))
        ));
        assert!(matches!(
            pixel_to_metric(10.0, -3.0, &c),
            Err(GeometryError::NonPositiveMeanDepth(_))
        ));
        assert!(matches!(
            pixel_to_metric(-1.0, 100.0, &c),
            Err(GeometryError::NegativePixelLength(_))
        ));
    }

    #[test]
    fn pixel_to_metric_linear_scaling() {
        let c = intr(600.0, (0.0, 0.0));
        let base = pixel_to_metric(37.0, 800.0, &c).unwrap();
        assert_eq!(pixel_to_metric(74.0, 800.0, &c).unwrap(), 2.0 * base);
        assert_eq!(pixel_to_metric(37.0, 1600.0, &c).unwrap(), 2.0 * base);
    }

    #[test]
    fn back_project_principal_point() {
        let c = intr(600.0, (424.0, 240.0));
        let cloud = back_project("f", &[Pixel::new(424.0, 240.0, 800.0)], &c).unwrap();
        assert_eq!(cloud.points, vec![Point3::new(0.0, 0.0, 800.0)]);
    }

    #[test]
    fn back_project_unit_slope_ray() {
        let c = intr(600.0, (0.0, 0.0));
        let cloud = back_project("f", &[Pixel::new(600.0, 0.0, 500.0)], &c).unwrap();
        assert_eq!(cloud.points, vec![Point3::new(500.0, 0.0, 500.0)]);
    }

    #[test]
    fn back_project_hand_value() {
        // u-u0 = 100, v-v0 = -50, z = 1200, f = 600 -> (200, -100, 1200).
        let c = intr(600.0, (10.0, 20.0));
        let cloud = back_project("f", &[Pixel::new(110.0, -30.0, 1200.0)], &c).unwrap();
        assert_eq!(cloud.points, vec![Point3::new(200.0, -100.0, 1200.0)]);
    }

    #[test]
    fn back_project_rejects_invalid_depth_with_index() {
        let c = intr(600.0, (0.0, 0.0));
        let pixels = vec![
            Pixel::new(1.0, 1.0, 100.0),
            Pixel::new(2.0, 2.0, 0.0),
            Pixel::new(3.0, 3.0, 50.0),
        ];
        match back_project("f", &pixels, &c) {
            Err(GeometryError::InvalidDepth { index, z }) => {
                assert_eq!(index, 1);
                assert_eq!(z, 0.0);
            }
            other => panic!("expected InvalidDepth, got {other:?}"),
        }
    }

    #[test]
    fn back_project_preserves_count_and_order() {
        let c = intr(450.0, (320.0, 240.0));
        let pixels: Vec<Pixel> = (0..57)
            .map(|i| Pixel::new(i as f64 * 3.0, 480.0 - i as f64, 400.0 + i as f64))
            .collect();
        let cloud = back_project("f", &pixels, &c).unwrap();
        assert_eq!(cloud.len(), pixels.len());
        for (px, pt) in pixels.iter().zip(&cloud.points) {
            assert_eq!(pt.z, px.z);
        }
    }

    #[test]
    fn project_inverts_back_project_examples() {
        let c = intr(600.0, (424.0, 240.0));
        let px = project(&Point3::new(0.0, 0.0, 800.0), &c).unwrap();
        assert_eq!((px.u, px.v, px.z), (424.0, 240.0, 800.0));

        let px = project(&Point3::new(500.0, 0.0, 500.0), &c).unwrap();
        assert_eq!(px.u - 424.0, 600.0);
        assert_eq!(px.v - 240.0, 0.0);
    }

    #[test]
    fn project_rejects_non_positive_z() {
        let c = intr(600.0, (0.0, 0.0));
        assert!(project(&Point3::new(1.0, 1.0, 0.0), &c).is_err());
        assert!(project(&Point3::new(1.0, 1.0, -10.0), &c).is_err());
    }

    #[test]
    fn round_trip_random_points() {
        let c = intr(615.3, (424.0, 240.0));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut worst: f64 = 0.0;
        for _ in 0..1000 {
            let z = rng.gen_range(300.0..3000.0);
            let p = Point3::new(
                rng.gen_range(-500.0..500.0),
                rng.gen_range(-400.0..400.0),
                z,
            );
            let px = project(&p, &c).unwrap();
            let back = back_project("f", &[px], &c).unwrap().points[0];
            for (a, b) in [(p.x, back.x), (p.y, back.y), (p.z, back.z)] {
                let rel = (a - b).abs() / a.abs().max(1.0);
                worst = worst.max(rel);
            }
        }
        assert!(worst < 1e-9, "max relative round-trip error {worst}");
    }
}
