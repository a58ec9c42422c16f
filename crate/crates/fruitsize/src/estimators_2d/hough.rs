//! Hough circle transform over a binary mask.
//!
//! Boundary pixels (mask pixels with at least one non-mask 4-neighbor)
//! vote in a 3D accumulator over integer circle centers and radii. The
//! center grid is the mask's extent box dilated by a configurable
//! fraction; candidate radii span a configurable fraction of the longest
//! extent side in 1 px steps. Each (boundary pixel, center) pair votes
//! for the radius bin nearest its distance. The highest-vote circle wins;
//! ties break to the smaller radius, then the lexicographically smaller
//! center, which makes the fit deterministic.

use super::{Estimator2dError, FruitMask};
use std::collections::HashSet;

/// Minimum number of boundary pixels for a meaningful circle fit.
const MIN_BOUNDARY_PIXELS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoughConfig {
    /// Radius search range as fractions of max(extent height, width).
    pub radius_frac: (f64, f64),
    /// Center search box: mask extent dilated by this fraction of each side.
    pub center_dilation: f64,
}

impl Default for HoughConfig {
    fn default() -> Self {
        Self {
            radius_frac: (0.25, 0.75),
            center_dilation: 0.25,
        }
    }
}

/// Circle fit in pixel coordinates with its accumulator vote count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleFit {
    pub center: (f64, f64),
    pub radius: f64,
    pub accumulator_score: u32,
}

impl CircleFit {
    /// Reported pixel diameter, `2 * radius`.
    pub fn diameter(&self) -> f64 {
        2.0 * self.radius
    }
}

/// Mask pixels with at least one 4-neighbor outside the mask.
pub(crate) fn boundary_pixels(mask: &FruitMask) -> Vec<(i32, i32)> {
    let set: HashSet<(i32, i32)> = mask.pixels().iter().copied().collect();
    mask.pixels()
        .iter()
        .copied()
        .filter(|&(u, v)| {
            !(set.contains(&(u - 1, v))
                && set.contains(&(u + 1, v))
                && set.contains(&(u, v - 1))
                && set.contains(&(u, v + 1)))
        })
        .collect()
}

/// Fits a circle to the mask boundary and returns the best-voted circle.
pub fn estimate_2d_hough(
    mask: &FruitMask,
    config: &HoughConfig,
) -> Result<CircleFit, Estimator2dError> {
    let boundary = boundary_pixels(mask);
    if boundary.len() < MIN_BOUNDARY_PIXELS {
        return Err(Estimator2dError::InsufficientBoundary {
            found: boundary.len(),
            required: MIN_BOUNDARY_PIXELS,
        });
    }

    let (u_min, v_min, u_max, v_max) = mask.extent();
    let w = (u_max - u_min) as f64;
    let h = (v_max - v_min) as f64;
    let max_side = w.max(h).max(1.0);

    let r_lo = ((config.radius_frac.0 * max_side).round() as i64).max(1);
    let r_hi = ((config.radius_frac.1 * max_side).round() as i64).max(r_lo);
    let n_radii = (r_hi - r_lo + 1) as usize;

    let du = (config.center_dilation * w).round() as i32;
    let dv = (config.center_dilation * h).round() as i32;
    let cu_lo = u_min - du;
    let cu_hi = u_max + du;
    let cv_lo = v_min - dv;
    let cv_hi = v_max + dv;
    let n_cu = (cu_hi - cu_lo + 1) as usize;
    let n_cv = (cv_hi - cv_lo + 1) as usize;

    let mut accumulator = vec![0u32; n_cu * n_cv * n_radii];
    for ci in 0..n_cu {
        let cu = cu_lo + ci as i32;
        for cj in 0..n_cv {
            let cv = cv_lo + cj as i32;
            let base = (ci * n_cv + cj) * n_radii;
            for &(bu, bv) in &boundary {
                let dx = (bu - cu) as f64;
                let dy = (bv - cv) as f64;
                let r = (dx * dx + dy * dy).sqrt().round() as i64;
                if r >= r_lo && r <= r_hi {
                    accumulator[base + (r - r_lo) as usize] += 1;
                }
            }
        }
    }

    // Deterministic argmax: most votes, then smaller radius, then smaller
    // (u_c, v_c) lexicographically.
    let mut best: Option<(u32, i64, i32, i32)> = None;
    for ci in 0..n_cu {
        let cu = cu_lo + ci as i32;
        for cj in 0..n_cv {
            let cv = cv_lo + cj as i32;
            let base = (ci * n_cv + cj) * n_radii;
            for ri in 0..n_radii {
                let votes = accumulator[base + ri];
                if votes == 0 {
                    continue;
                }
                let r = r_lo + ri as i64;
                let candidate = (votes, r, cu, cv);
                let better = match best {
                    None => true,
                    Some((bv, br, bcu, bcv)) => {
                        votes > bv
                            || (votes == bv
                                && (r < br || (r == br && (cu, cv) < (bcu, bcv))))
                    }
                };
                if better {
                    best = Some(candidate);
                }
            }
        }
    }

    let (votes, r, cu, cv) = best.ok_or(Estimator2dError::InsufficientBoundary {
        found: boundary.len(),
        required: MIN_BOUNDARY_PIXELS,
    })?;
    Ok(CircleFit {
        center: (cu as f64, cv as f64),
        radius: r as f64,
        accumulator_score: votes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Rasterized disk: pixels with (u-cu)^2 + (v-cv)^2 <= r^2.
    fn disk(cu: i32, cv: i32, r: i32) -> Vec<(i32, i32)> {
        let mut px = Vec::new();
        for u in cu - r..=cu + r {
            for v in cv - r..=cv + r {
                if (u - cu).pow(2) + (v - cv).pow(2) <= r * r {
                    px.push((u, v));
                }
            }
        }
        px
    }

    #[test]
    fn too_few_boundary_pixels_is_an_error() {
        let mask = FruitMask::new(vec![(0, 0), (1, 0), (0, 1)]).unwrap();
        assert!(matches!(
            estimate_2d_hough(&mask, &HoughConfig::default()),
            Err(Estimator2dError::InsufficientBoundary { .. })
        ));
    }

    #[test]
    fn boundary_of_disk_is_a_ring() {
        let mask = FruitMask::new(disk(0, 0, 10)).unwrap();
        let boundary = boundary_pixels(&mask);
        // Every boundary pixel sits close to the ideal circle.
        for (u, v) in &boundary {
            let d = ((u * u + v * v) as f64).sqrt();
            assert!(d > 8.5 && d <= 10.0 + 1e-9, "boundary pixel at distance {d}");
        }
        assert!(boundary.len() >= 40);
    }

    #[test]
    fn recovers_disk_radius_within_one_pixel() {
        let mask = FruitMask::new(disk(100, 80, 30)).unwrap();
        let fit = estimate_2d_hough(&mask, &HoughConfig::default()).unwrap();
        assert!((fit.radius - 30.0).abs() <= 1.0, "radius {}", fit.radius);
        assert!((fit.center.0 - 100.0).abs() <= 1.0);
        assert!((fit.center.1 - 80.0).abs() <= 1.0);
    }

    #[test]
    fn half_disk_still_votes_for_true_center() {
        let px: Vec<(i32, i32)> = disk(0, 0, 30)
            .into_iter()
            .filter(|&(u, _)| u <= 0)
            .collect();
        let mask = FruitMask::new(px).unwrap();
        let fit = estimate_2d_hough(&mask, &HoughConfig::default()).unwrap();
        assert!((fit.radius - 30.0).abs() <= 2.0, "radius {}", fit.radius);
    }

    #[test]
    fn ellipse_fit_bounded_by_extreme_curvatures() {
        // Semi-axes a = 40 (u), b = 20 (v). The accumulator argmax is
        // bounded by the extreme osculating-circle radii of the boundary,
        // b^2/a = 10 and a^2/b = 80, and must exceed the minor semi-axis
        // (no circle tighter than the flat side collects a long arc).
        // The radius band is widened so neither bound comes from clipping.
        let mut px = Vec::new();
        for u in -40..=40 {
            for v in -20..=20 {
                let x = u as f64 / 40.0;
                let y = v as f64 / 20.0;
                if x * x + y * y <= 1.0 {
                    px.push((u, v));
                }
            }
        }
        let mask = FruitMask::new(px).unwrap();
        let cfg = HoughConfig {
            radius_frac: (0.1, 1.05),
            center_dilation: 0.25,
        };
        let fit = estimate_2d_hough(&mask, &cfg).unwrap();
        assert!(
            fit.radius > 20.0 && fit.radius < 80.0,
            "fitted radius {} outside curvature bounds (20, 80)",
            fit.radius
        );
    }

    #[test]
    fn translation_shifts_center_only() {
        let mask = FruitMask::new(disk(0, 0, 14)).unwrap();
        let shifted = mask.translated(500, -300);
        let a = estimate_2d_hough(&mask, &HoughConfig::default()).unwrap();
        let b = estimate_2d_hough(&shifted, &HoughConfig::default()).unwrap();
        assert_eq!(a.radius, b.radius);
        assert_eq!(a.accumulator_score, b.accumulator_score);
        assert_eq!(a.center.0 + 500.0, b.center.0);
        assert_eq!(a.center.1 - 300.0, b.center.1);
    }
}
