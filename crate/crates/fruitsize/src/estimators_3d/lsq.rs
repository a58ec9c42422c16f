//! Sphere fitting: exact 4-point circumsphere and least-squares fit of
//! the algebraic cost `J(c, r) = sum_i (|p_i - c|^2 - r^2)^2`.
//!
//! Expanding the inner expression gives `|p|^2 - 2 c . p - k` with
//! `k = r^2 - |c|^2`, linear in `(c, k)`, so the linear solve already
//! minimizes J; damped Gauss-Newton then polishes in `(c, r)` space and
//! reports convergence diagnostics.

use super::{geometric_rms, Estimator3dError, SphereFit};
use crate::geometry::{FruitPointCloud, Point3};
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};

/// Minimum cloud size for a meaningful 4-parameter fit.
pub(crate) const LSQ_MIN_POINTS: usize = 10;

const GN_MAX_ITERATIONS: usize = 100;
const GN_PARAM_TOLERANCE: f64 = 1e-9;

/// Circumsphere of four pairwise-distinct, non-coplanar points.
///
/// Subtracting the sphere equation of the first point from the other
/// three gives the linear system `2 (p_i - p_1) . c = |p_i|^2 - |p_1|^2`.
/// A quadruple whose normalized determinant falls below 1e-9 (relative
/// to the point scale) is rejected as degenerate.
pub fn sphere_from_4_points(
    p1: &Point3,
    p2: &Point3,
    p3: &Point3,
    p4: &Point3,
) -> Result<SphereFit, Estimator3dError> {
    let rows = [
        [2.0 * (p2.x - p1.x), 2.0 * (p2.y - p1.y), 2.0 * (p2.z - p1.z)],
        [2.0 * (p3.x - p1.x), 2.0 * (p3.y - p1.y), 2.0 * (p3.z - p1.z)],
        [2.0 * (p4.x - p1.x), 2.0 * (p4.y - p1.y), 2.0 * (p4.z - p1.z)],
    ];
    let m = Matrix3::from_rows(&[
        Vector3::from_row_slice(&rows[0]).transpose(),
        Vector3::from_row_slice(&rows[1]).transpose(),
        Vector3::from_row_slice(&rows[2]).transpose(),
    ]);
    let sq = |p: &Point3| p.x * p.x + p.y * p.y + p.z * p.z;
    let rhs = Vector3::new(sq(p2) - sq(p1), sq(p3) - sq(p1), sq(p4) - sq(p1));

    // Normalized determinant: |det| over the product of row norms is the
    // volume factor, zero for coplanar or coincident quadruples.
    let det = m.determinant();
    let row_norm_product: f64 = (0..3)
        .map(|i| m.row(i).norm())
        .fold(1.0, |acc, n| acc * n.max(f64::MIN_POSITIVE));
    if det.abs() < 1e-9 * row_norm_product {
        return Err(Estimator3dError::DegenerateSample);
    }

    let c = m
        .lu()
        .solve(&rhs)
        .ok_or(Estimator3dError::DegenerateSample)?;
    let center = Point3::new(c.x, c.y, c.z);
    let radius = center.distance(p1);
    let pts = [*p1, *p2, *p3, *p4];
    Ok(SphereFit {
        center,
        radius,
        inlier_count: None,
        residual_rms: geometric_rms(&pts, &center, radius),
        iterations_used: 0,
        converged: true,
    })
}

/// The algebraic cost J at (center, radius).
fn algebraic_cost(points: &[Point3], center: &Point3, radius: f64) -> f64 {
    points
        .iter()
        .map(|p| {
            let f = p.distance_squared(center) - radius * radius;
            f * f
        })
        .sum()
}

/// Linear minimizer of J in the (center, k) parameterization, computed
/// on centroid-shifted coordinates for conditioning.
fn algebraic_initialization(points: &[Point3]) -> Result<(Point3, f64), Estimator3dError> {
    let n = points.len() as f64;
    let centroid = Point3::new(
        points.iter().map(|p| p.x).sum::<f64>() / n,
        points.iter().map(|p| p.y).sum::<f64>() / n,
        points.iter().map(|p| p.z).sum::<f64>() / n,
    );

    let mut ata = Matrix4::zeros();
    let mut atb = Vector4::zeros();
    for p in points {
        let x = p.x - centroid.x;
        let y = p.y - centroid.y;
        let z = p.z - centroid.z;
        let row = Vector4::new(2.0 * x, 2.0 * y, 2.0 * z, 1.0);
        let b = x * x + y * y + z * z;
        ata += row * row.transpose();
        atb += row * b;
    }
    let solution = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Estimator3dError::DegenerateGeometry("singular normal equations".into()))?;
    let (cx, cy, cz, k) = (solution.x, solution.y, solution.z, solution.w);
    let r_sq = k + cx * cx + cy * cy + cz * cz;
    if !(r_sq > 0.0) {
        return Err(Estimator3dError::DegenerateGeometry(
            "non-positive squared radius from algebraic fit".into(),
        ));
    }
    Ok((
        Point3::new(cx + centroid.x, cy + centroid.y, cz + centroid.z),
        r_sq.sqrt(),
    ))
}

/// Smallest/largest eigenvalue ratio of the centered scatter matrix;
/// near zero means the cloud is coplanar (or worse).
fn flatness_ratio(points: &[Point3]) -> f64 {
    let n = points.len() as f64;
    let cx = points.iter().map(|p| p.x).sum::<f64>() / n;
    let cy = points.iter().map(|p| p.y).sum::<f64>() / n;
    let cz = points.iter().map(|p| p.z).sum::<f64>() / n;
    let mut cov = Matrix3::zeros();
    for p in points {
        let d = Vector3::new(p.x - cx, p.y - cy, p.z - cz);
        cov += d * d.transpose();
    }
    let eig = cov.symmetric_eigenvalues();
    let max = eig.iter().fold(0.0f64, |a, &b| a.max(b));
    let min = eig.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if max <= 0.0 {
        0.0
    } else {
        (min / max).max(0.0)
    }
}

/// Least-squares sphere fit minimizing J, with Levenberg-style damping:
/// lambda starts at 1e-3, divides by 10 on an accepted step and
/// multiplies by 10 on a rejected one, so J never increases between
/// accepted iterates. Stops at relative parameter change below 1e-9 or
/// 100 iterations; a non-converged fit returns the best iterate with
/// `converged = false`.
pub fn lsq_sphere_fit(cloud: &FruitPointCloud) -> Result<SphereFit, Estimator3dError> {
    let points = &cloud.points;
    if points.len() < LSQ_MIN_POINTS {
        return Err(Estimator3dError::InsufficientPoints {
            found: points.len(),
            required: LSQ_MIN_POINTS,
        });
    }
    if flatness_ratio(points) < 1e-12 {
        return Err(Estimator3dError::DegenerateGeometry(
            "cloud is coplanar".into(),
        ));
    }

    let (mut center, mut radius) = algebraic_initialization(points)?;
    let mut cost = algebraic_cost(points, &center, radius);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < GN_MAX_ITERATIONS {
        iterations += 1;
        // Normal equations for residuals f_i = |p_i - c|^2 - r^2 with
        // gradient rows [-2(p - c), -2r].
        let mut jtj = Matrix4::zeros();
        let mut jtf = Vector4::zeros();
        for p in points {
            let dx = p.x - center.x;
            let dy = p.y - center.y;
            let dz = p.z - center.z;
            let f = dx * dx + dy * dy + dz * dz - radius * radius;
            let row = Vector4::new(-2.0 * dx, -2.0 * dy, -2.0 * dz, -2.0 * radius);
            jtj += row * row.transpose();
            jtf += row * f;
        }

        let mut accepted = false;
        for _ in 0..10 {
            let mut damped = jtj;
            for i in 0..4 {
                damped[(i, i)] += lambda * jtj[(i, i)].max(1e-12);
            }
            let Some(step) = damped.lu().solve(&(-jtf)) else {
                lambda *= 10.0;
                continue;
            };
            let candidate_center = Point3::new(
                center.x + step.x,
                center.y + step.y,
                center.z + step.z,
            );
            let candidate_radius = radius + step.w;
            let candidate_cost = algebraic_cost(points, &candidate_center, candidate_radius);
            if candidate_cost <= cost && candidate_radius > 0.0 {
                let scale = radius.abs() + center.x.abs() + center.y.abs() + center.z.abs() + 1.0;
                let change = (step.x.abs() + step.y.abs() + step.z.abs() + step.w.abs()) / scale;
                center = candidate_center;
                radius = candidate_radius;
                cost = candidate_cost;
                lambda = (lambda / 10.0).max(1e-15);
                accepted = true;
                if change < GN_PARAM_TOLERANCE {
                    converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No damping level improves J: the iterate is at a minimum.
            converged = true;
        }
        if converged {
            break;
        }
    }

    if !(radius > 0.0) {
        return Err(Estimator3dError::DegenerateGeometry(
            "fit collapsed to non-positive radius".into(),
        ));
    }
    Ok(SphereFit {
        center,
        radius,
        inlier_count: None,
        residual_rms: geometric_rms(points, &center, radius),
        iterations_used: iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn unit_vector(rng: &mut ChaCha8Rng) -> (f64, f64, f64) {
        loop {
            let v = (
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0f64..1.0),
                rng.gen_range(-1.0f64..1.0),
            );
            let n = (v.0 * v.0 + v.1 * v.1 + v.2 * v.2).sqrt();
            if n > 1e-3 && n <= 1.0 {
                return (v.0 / n, v.1 / n, v.2 / n);
            }
        }
    }

    /// Samples the sphere cap with polar angle up to `max_theta` around +z.
    fn sphere_cap(
        rng: &mut ChaCha8Rng,
        center: Point3,
        r: f64,
        n: usize,
        max_theta: f64,
        sigma: f64,
    ) -> Vec<Point3> {
        let noise = Normal::new(0.0, sigma.max(f64::MIN_POSITIVE)).unwrap();
        (0..n)
            .map(|_| {
                let cos_min = max_theta.cos();
                let cos_t = rng.gen_range(cos_min..1.0);
                let sin_t = (1.0 - cos_t * cos_t).sqrt();
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let rr = if sigma > 0.0 {
                    r + noise.sample(rng)
                } else {
                    r
                };
                Point3::new(
                    center.x + rr * sin_t * phi.cos(),
                    center.y + rr * sin_t * phi.sin(),
                    center.z + rr * cos_t,
                )
            })
            .collect()
    }

    #[test]
    fn symmetric_quadruple_recovers_origin_sphere() {
        for r in [1.0, 40.0, 47.5] {
            let fit = sphere_from_4_points(
                &Point3::new(r, 0.0, 0.0),
                &Point3::new(-r, 0.0, 0.0),
                &Point3::new(0.0, r, 0.0),
                &Point3::new(0.0, 0.0, r),
            )
            .unwrap();
            assert!(fit.center.x.abs() < 1e-12);
            assert!(fit.center.y.abs() < 1e-12);
            assert!(fit.center.z.abs() < 1e-12);
            assert!((fit.radius - r).abs() < 1e-12 * r.max(1.0));
        }
    }

    #[test]
    fn coplanar_quadruple_is_degenerate() {
        let err = sphere_from_4_points(
            &Point3::new(0.0, 0.0, 1.0),
            &Point3::new(1.0, 0.0, 1.0),
            &Point3::new(0.0, 1.0, 1.0),
            &Point3::new(1.0, 1.0, 1.0),
        )
        .unwrap_err();
        assert_eq!(err, Estimator3dError::DegenerateSample);
    }

    #[test]
    fn coincident_points_are_degenerate() {
        let p = Point3::new(3.0, 4.0, 5.0);
        assert!(sphere_from_4_points(&p, &p, &Point3::new(1.0, 0.0, 0.0), &p).is_err());
    }

    #[test]
    fn random_quadruples_recover_known_sphere() {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let center = Point3::new(12.0, -7.0, 850.0);
        let r = 40.0;
        let mut accepted = 0;
        while accepted < 1000 {
            let mut ps = Vec::with_capacity(4);
            for _ in 0..4 {
                let (x, y, z) = unit_vector(&mut rng);
                ps.push(Point3::new(
                    center.x + r * x,
                    center.y + r * y,
                    center.z + r * z,
                ));
            }
            match sphere_from_4_points(&ps[0], &ps[1], &ps[2], &ps[3]) {
                Err(Estimator3dError::DegenerateSample) => continue,
                Err(e) => panic!("unexpected error {e:?}"),
                Ok(fit) => {
                    accepted += 1;
                    assert!((fit.radius - r).abs() / r < 1e-6, "radius {}", fit.radius);
                    assert!(fit.center.distance(&center) / r < 1e-6);
                    // Every input point lies on the circumsphere.
                    for p in &ps {
                        let d = (p.distance(&fit.center) - fit.radius).abs();
                        assert!(d / r < 1e-9);
                    }
                }
            }
        }
    }

    #[test]
    fn noise_free_full_half_quarter_coverage_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let center = Point3::new(5.0, -3.0, 900.0);
        for (r, max_theta) in [
            (20.0, std::f64::consts::PI),       // full sphere
            (38.0, std::f64::consts::PI / 2.0), // half
            (47.5, std::f64::consts::PI / 4.0), // quarter cap
        ] {
            let pts = sphere_cap(&mut rng, center, r, 500, max_theta, 0.0);
            let fit = lsq_sphere_fit(&FruitPointCloud::new("t", pts)).unwrap();
            assert!(
                (fit.radius - r).abs() / r < 1e-6,
                "r={r} theta={max_theta}: got {}",
                fit.radius
            );
            assert!(fit.converged);
            assert!(fit.residual_rms < 1e-6);
        }
    }

    #[test]
    fn gaussian_noise_monte_carlo_within_half_mm() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let center = Point3::new(0.0, 0.0, 1000.0);
        let mut hits = 0;
        for _ in 0..100 {
            let pts = sphere_cap(&mut rng, center, 40.0, 2000, std::f64::consts::PI, 1.0);
            let fit = lsq_sphere_fit(&FruitPointCloud::new("t", pts)).unwrap();
            if (fit.radius - 40.0).abs() <= 0.5 {
                hits += 1;
            }
        }
        assert!(hits >= 95, "only {hits}/100 trials within 0.5 mm");
    }

    #[test]
    fn too_few_points_is_an_error() {
        let pts: Vec<Point3> = (0..9).map(|i| Point3::new(i as f64, 0.0, 1.0)).collect();
        assert!(matches!(
            lsq_sphere_fit(&FruitPointCloud::new("t", pts)),
            Err(Estimator3dError::InsufficientPoints { .. })
        ));
    }

    #[test]
    fn coplanar_cloud_is_degenerate_geometry() {
        let mut pts = Vec::new();
        for x in 0..5 {
            for y in 0..4 {
                pts.push(Point3::new(x as f64, y as f64, 700.0));
            }
        }
        assert!(matches!(
            lsq_sphere_fit(&FruitPointCloud::new("t", pts)),
            Err(Estimator3dError::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn rigid_motion_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let pts = sphere_cap(
            &mut rng,
            Point3::new(0.0, 0.0, 600.0),
            30.0,
            400,
            2.0,
            0.5,
        );
        let fit0 = lsq_sphere_fit(&FruitPointCloud::new("t", pts.clone())).unwrap();
        let a = 25.0f64.to_radians();
        let moved: Vec<Point3> = pts
            .iter()
            .map(|p| {
                Point3::new(
                    p.x * a.cos() - p.z * a.sin() + 40.0,
                    p.y - 13.0,
                    p.x * a.sin() + p.z * a.cos() + 5.0,
                )
            })
            .collect();
        let fit1 = lsq_sphere_fit(&FruitPointCloud::new("t", moved)).unwrap();
        assert!((fit0.radius - fit1.radius).abs() / fit0.radius < 1e-9);
        let expected_center = Point3::new(
            fit0.center.x * a.cos() - fit0.center.z * a.sin() + 40.0,
            fit0.center.y - 13.0,
            fit0.center.x * a.sin() + fit0.center.z * a.cos() + 5.0,
        );
        assert!(fit1.center.distance(&expected_center) / fit0.radius < 1e-9);
    }
}
