//! Point-cloud diameter estimators.
//!
//! * `estimate_3d_lseg` — exact maximum pairwise distance (largest
//!   segment) of the cloud.
//! * `lsq_sphere_fit` — sphere fit minimizing the algebraic cost
//!   `J = sum((|p - c|^2 - r^2)^2)`, linear initialization plus damped
//!   Gauss-Newton refinement.
//! * `ransac_sphere` — robust fit from random 4-point circumspheres with
//!   a strict inlier band around the candidate surface.

mod hull3d;
mod lsq;
mod ransac;

pub use lsq::{lsq_sphere_fit, sphere_from_4_points};
pub use ransac::{ransac_sphere, RansacConfig};

use crate::geometry::{FruitPointCloud, Point3};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Estimator3dError {
    #[error("insufficient points: got {found}, need at least {required}")]
    InsufficientPoints { found: usize, required: usize },
    #[error("degenerate sample: the four points are coplanar or coincident")]
    DegenerateSample,
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
}

/// Result of a sphere fit. `inlier_count` is populated by RANSAC only;
/// `residual_rms` is the root-mean-square geometric residual
/// `||p - center|| - radius` in millimetres over the points the model
/// was scored on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereFit {
    pub center: Point3,
    pub radius: f64,
    pub inlier_count: Option<usize>,
    pub residual_rms: f64,
    pub iterations_used: usize,
    pub converged: bool,
}

impl SphereFit {
    /// Estimated diameter, `2 * radius`.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

pub(crate) fn geometric_rms(points: &[Point3], center: &Point3, radius: f64) -> f64 {
    if points.is_empty() {
        return 0.0;
    }
    let sum: f64 = points
        .iter()
        .map(|p| {
            let e = p.distance(center) - radius;
            e * e
        })
        .sum();
    (sum / points.len() as f64).sqrt()
}

/// Exact diameter of the cloud: maximum pairwise Euclidean distance,
/// computed over convex-hull candidate vertices with an O(n^2) brute
/// force fallback below 64 points. Equals the brute-force maximum
/// exactly.
pub fn estimate_3d_lseg(cloud: &FruitPointCloud) -> Result<f64, Estimator3dError> {
    let points = &cloud.points;
    if points.len() < 2 {
        return Err(Estimator3dError::InsufficientPoints {
            found: points.len(),
            required: 2,
        });
    }
    let candidates = hull3d::diameter_candidates(points);
    let mut best = 0.0f64;
    for i in 0..candidates.len() {
        let a = &points[candidates[i]];
        for &cj in &candidates[i + 1..] {
            let d = a.distance_squared(&points[cj]);
            if d > best {
                best = d;
            }
        }
    }
    Ok(best.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn brute_force_diameter(points: &[Point3]) -> f64 {
        let mut best = 0.0f64;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = points[i].distance_squared(&points[j]);
                if d > best {
                    best = d;
                }
            }
        }
        best.sqrt()
    }

    fn cloud(points: Vec<Point3>) -> FruitPointCloud {
        FruitPointCloud::new("test", points)
    }

    #[test]
    fn two_points_distance() {
        let c = cloud(vec![
            Point3::new(0.0, 0.0, 500.0),
            Point3::new(76.0, 0.0, 500.0),
        ]);
        assert_eq!(estimate_3d_lseg(&c).unwrap(), 76.0);
    }

    #[test]
    fn fewer_than_two_points_is_an_error() {
        let c = cloud(vec![Point3::new(0.0, 0.0, 1.0)]);
        assert!(matches!(
            estimate_3d_lseg(&c),
            Err(Estimator3dError::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn dense_sphere_sampling_approaches_diameter() {
        // Fibonacci-sphere sampling of a 76 mm sphere; spacing shrinks
        // with n, and the measured diameter must sit just below 76.
        let n = 4000;
        let r = 38.0;
        let mut points = Vec::with_capacity(n);
        let golden = std::f64::consts::PI * (3.0 - 5.0f64.sqrt());
        for i in 0..n {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let rad = (1.0 - y * y).sqrt();
            let th = golden * i as f64;
            points.push(Point3::new(
                r * rad * th.cos(),
                r * y,
                1000.0 + r * rad * th.sin(),
            ));
        }
        let spacing = (4.0 * std::f64::consts::PI * r * r / n as f64).sqrt();
        let d = estimate_3d_lseg(&cloud(points)).unwrap();
        assert!(d <= 76.0 + 1e-9);
        assert!(d > 76.0 - 2.0 * spacing, "diameter {d}, spacing {spacing}");
    }

    #[test]
    fn matches_brute_force_on_random_clouds() {
        let mut rng = ChaCha8Rng::seed_from_u64(97);
        for trial in 0..100 {
            let n = rng.gen_range(2..400);
            let points: Vec<Point3> = (0..n)
                .map(|_| {
                    Point3::new(
                        rng.gen_range(-100.0..100.0),
                        rng.gen_range(-100.0..100.0),
                        rng.gen_range(200.0..400.0),
                    )
                })
                .collect();
            let brute = brute_force_diameter(&points);
            let fast = estimate_3d_lseg(&cloud(points)).unwrap();
            assert_eq!(fast, brute, "trial {trial}");
        }
    }

    #[test]
    fn matches_brute_force_on_coplanar_cloud() {
        // Flat grid: the degenerate path must stay exact.
        let mut points = Vec::new();
        for x in 0..20 {
            for y in 0..15 {
                points.push(Point3::new(x as f64 * 2.0, y as f64 * 3.0, 500.0));
            }
        }
        let brute = brute_force_diameter(&points);
        assert_eq!(estimate_3d_lseg(&cloud(points)).unwrap(), brute);
    }

    #[test]
    fn sphere_sample_never_exceeds_true_diameter() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let r = rng.gen_range(20.0..47.5);
            let n = rng.gen_range(16..600);
            let points: Vec<Point3> = (0..n)
                .map(|_| {
                    let v = loop {
                        let v = (
                            rng.gen_range(-1.0f64..1.0),
                            rng.gen_range(-1.0f64..1.0),
                            rng.gen_range(-1.0f64..1.0),
                        );
                        let norm = (v.0 * v.0 + v.1 * v.1 + v.2 * v.2).sqrt();
                        if norm > 1e-6 {
                            break (v.0 / norm, v.1 / norm, v.2 / norm);
                        }
                    };
                    Point3::new(r * v.0, r * v.1, 900.0 + r * v.2)
                })
                .collect();
            let d = estimate_3d_lseg(&cloud(points)).unwrap();
            assert!(d <= 2.0 * r + 1e-9);
        }
    }

    #[test]
    fn rigid_motion_leaves_diameter_unchanged() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let points: Vec<Point3> = (0..300)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(-50.0..50.0),
                    rng.gen_range(800.0..900.0),
                )
            })
            .collect();
        let d0 = estimate_3d_lseg(&cloud(points.clone())).unwrap();
        // Rotate about z by 37 degrees and translate.
        let a = 37.0f64.to_radians();
        let moved: Vec<Point3> = points
            .iter()
            .map(|p| {
                Point3::new(
                    p.x * a.cos() - p.y * a.sin() + 11.0,
                    p.x * a.sin() + p.y * a.cos() - 7.0,
                    p.z + 123.0,
                )
            })
            .collect();
        let d1 = estimate_3d_lseg(&cloud(moved)).unwrap();
        assert!((d0 - d1).abs() / d0 < 1e-9);
    }
}
