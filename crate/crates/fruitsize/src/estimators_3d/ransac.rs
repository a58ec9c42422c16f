//! RANSAC sphere fitting.
//!
//! Each iteration draws four distinct points from a seeded RNG, builds
//! their circumsphere and counts inliers by the strict band
//! `-delta < ||p - c|| - r < delta`. Degenerate quadruples are redrawn
//! without consuming an iteration, bounded by 10x the iteration budget.
//! The candidate with the most inliers wins (ties break to the smaller
//! geometric RMS over its inliers); the search exits early once the
//! inlier ratio strictly exceeds the threshold. The winning inlier set
//! is refit with the least-squares cost unless refitting is disabled or
//! the set is too small for it.

use super::lsq::{lsq_sphere_fit, sphere_from_4_points, LSQ_MIN_POINTS};
use super::{geometric_rms, Estimator3dError, SphereFit};
use crate::geometry::{FruitPointCloud, Point3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RansacConfig {
    /// Inlier band half-width in millimetres.
    pub delta: f64,
    pub max_iterations: usize,
    /// Early-exit inlier ratio, in (0, 1].
    pub inlier_ratio_threshold: f64,
    /// RNG seed; runs with the same seed and input are bit-identical.
    pub seed: u64,
    /// Refit the winning inlier set by least squares (default). When
    /// disabled the raw circumsphere of the best sample is returned.
    pub refit: bool,
}

impl RansacConfig {
    /// Defaults (delta 3 mm, 500 iterations, 0.9 threshold, refit on)
    /// with an explicitly supplied seed.
    pub fn new(seed: u64) -> Self {
        Self {
            delta: 3.0,
            max_iterations: 500,
            inlier_ratio_threshold: 0.9,
            seed,
            refit: true,
        }
    }

    pub fn validate(&self) -> Result<(), Estimator3dError> {
        if !(self.delta > 0.0) {
            return Err(Estimator3dError::DegenerateGeometry(format!(
                "ransac delta must be positive, got {}",
                self.delta
            )));
        }
        if self.max_iterations < 1 {
            return Err(Estimator3dError::DegenerateGeometry(
                "ransac needs at least one iteration".into(),
            ));
        }
        if !(self.inlier_ratio_threshold > 0.0 && self.inlier_ratio_threshold <= 1.0) {
            return Err(Estimator3dError::DegenerateGeometry(format!(
                "ransac inlier ratio threshold must be in (0, 1], got {}",
                self.inlier_ratio_threshold
            )));
        }
        Ok(())
    }
}

fn inlier_indices(points: &[Point3], center: &Point3, radius: f64, delta: f64) -> Vec<usize> {
    points
        .iter()
        .enumerate()
        .filter(|(_, p)| {
            let e = p.distance(center) - radius;
            e > -delta && e < delta
        })
        .map(|(i, _)| i)
        .collect()
}

/// Robust sphere fit. Errors on fewer than four points or when every
/// drawn sample within the draw budget is degenerate.
pub fn ransac_sphere(
    cloud: &FruitPointCloud,
    config: &RansacConfig,
) -> Result<SphereFit, Estimator3dError> {
    config.validate()?;
    let points = &cloud.points;
    let n = points.len();
    if n < 4 {
        return Err(Estimator3dError::InsufficientPoints {
            found: n,
            required: 4,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let max_draws = 10 * config.max_iterations;
    let mut draws = 0;
    let mut iterations = 0;
    let mut best: Option<(SphereFit, Vec<usize>, f64)> = None; // fit, inliers, rms

    while iterations < config.max_iterations && draws < max_draws {
        draws += 1;
        let idx = rand::seq::index::sample(&mut rng, n, 4);
        let sample = match sphere_from_4_points(
            &points[idx.index(0)],
            &points[idx.index(1)],
            &points[idx.index(2)],
            &points[idx.index(3)],
        ) {
            Ok(s) => s,
            Err(Estimator3dError::DegenerateSample) => continue,
            Err(e) => return Err(e),
        };
        iterations += 1;

        let inliers = inlier_indices(points, &sample.center, sample.radius, config.delta);
        let inlier_points: Vec<Point3> = inliers.iter().map(|&i| points[i]).collect();
        let rms = geometric_rms(&inlier_points, &sample.center, sample.radius);
        let better = match &best {
            None => true,
            Some((_, best_inliers, best_rms)) => {
                inliers.len() > best_inliers.len()
                    || (inliers.len() == best_inliers.len() && rms < *best_rms)
            }
        };
        if better {
            best = Some((sample, inliers, rms));
        }
        if let Some((_, inliers, _)) = &best {
            if inliers.len() as f64 / n as f64 > config.inlier_ratio_threshold {
                break;
            }
        }
    }

    let (raw, inliers, rms) = best.ok_or(Estimator3dError::DegenerateGeometry(
        "all ransac samples degenerate".into(),
    ))?;
    let inlier_points: Vec<Point3> = inliers.iter().map(|&i| points[i]).collect();

    // Refit when enabled and the consensus set is large enough for the
    // least-squares fit; otherwise ship the raw circumsphere.
    let mut fit = raw;
    let mut converged = true;
    let mut residual = rms;
    if config.refit && inlier_points.len() >= LSQ_MIN_POINTS {
        if let Ok(refit) = lsq_sphere_fit(&FruitPointCloud::new(
            cloud.fruit_id.clone(),
            inlier_points.clone(),
        )) {
            converged = refit.converged;
            residual = geometric_rms(&inlier_points, &refit.center, refit.radius);
            fit = refit;
        }
    }

    Ok(SphereFit {
        center: fit.center,
        radius: fit.radius,
        inlier_count: Some(inliers.len()),
        residual_rms: residual,
        iterations_used: iterations,
        converged,
    })
}
