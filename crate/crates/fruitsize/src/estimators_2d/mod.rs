//! Image-plane diameter estimators.
//!
//! All three produce a diameter in pixels; conversion to millimetres is
//! a separate step (`geometry::pixel_to_metric` with the mean mask depth).
//!
//! * `estimate_2d_bbox` — longest side of the detection bounding box.
//! * `estimate_2d_lseg` — largest segment: exact maximum pairwise pixel
//!   distance within the mask, via convex hull + rotating calipers.
//! * `estimate_2d_hough` — circle fit of the mask boundary with a voting
//!   accumulator over (center, radius).

mod hough;
mod hull;

pub use hough::{estimate_2d_hough, CircleFit, HoughConfig};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Estimator2dError {
    #[error("degenerate bounding box: require u_max > u_min and v_max > v_min, got [{u_min}, {v_min}, {u_max}, {v_max}]")]
    DegenerateBox {
        u_min: f64,
        v_min: f64,
        u_max: f64,
        v_max: f64,
    },
    #[error("empty mask")]
    EmptyMask,
    #[error("insufficient boundary evidence for circle fit: {found} boundary pixels, need at least {required}")]
    InsufficientBoundary { found: usize, required: usize },
}

/// Axis-aligned bounding box in pixel coordinates, `u_max > u_min` and
/// `v_max > v_min` enforced at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundingBox {
    pub u_min: f64,
    pub v_min: f64,
    pub u_max: f64,
    pub v_max: f64,
}

impl BoundingBox {
    pub fn new(u_min: f64, v_min: f64, u_max: f64, v_max: f64) -> Result<Self, Estimator2dError> {
        if !(u_max > u_min && v_max > v_min) {
            return Err(Estimator2dError::DegenerateBox {
                u_min,
                v_min,
                u_max,
                v_max,
            });
        }
        Ok(Self {
            u_min,
            v_min,
            u_max,
            v_max,
        })
    }

    pub fn width(&self) -> f64 {
        self.u_max - self.u_min
    }

    pub fn height(&self) -> f64 {
        self.v_max - self.v_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Whether the lattice point (u, v) lies inside the closed box.
    pub fn contains(&self, u: f64, v: f64) -> bool {
        u >= self.u_min && u <= self.u_max && v >= self.v_min && v <= self.v_max
    }
}

/// Binary segmentation mask as a set of integer pixel coordinates.
/// Pixels are treated as lattice points (pixel centers), so the diameter
/// of a single-pixel mask is zero. Construction sorts, dedupes and
/// rejects empty input; the extent box is kept consistent with the
/// pixel set.
#[derive(Debug, Clone, PartialEq)]
pub struct FruitMask {
    pixels: Vec<(i32, i32)>,
    u_min: i32,
    v_min: i32,
    u_max: i32,
    v_max: i32,
}

impl FruitMask {
    pub fn new(mut pixels: Vec<(i32, i32)>) -> Result<Self, Estimator2dError> {
        if pixels.is_empty() {
            return Err(Estimator2dError::EmptyMask);
        }
        pixels.sort_unstable();
        pixels.dedup();
        let (mut u_min, mut v_min) = (i32::MAX, i32::MAX);
        let (mut u_max, mut v_max) = (i32::MIN, i32::MIN);
        for &(u, v) in &pixels {
            u_min = u_min.min(u);
            v_min = v_min.min(v);
            u_max = u_max.max(u);
            v_max = v_max.max(v);
        }
        Ok(Self {
            pixels,
            u_min,
            v_min,
            u_max,
            v_max,
        })
    }

    pub fn pixels(&self) -> &[(i32, i32)] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn contains(&self, u: i32, v: i32) -> bool {
        self.pixels.binary_search(&(u, v)).is_ok()
    }

    /// Extent of the pixel set: (u_min, v_min, u_max, v_max), inclusive.
    pub fn extent(&self) -> (i32, i32, i32, i32) {
        (self.u_min, self.v_min, self.u_max, self.v_max)
    }

    /// Width of the pixel extent as a lattice span (u_max - u_min).
    pub fn extent_width(&self) -> i32 {
        self.u_max - self.u_min
    }

    pub fn extent_height(&self) -> i32 {
        self.v_max - self.v_min
    }

    pub fn translated(&self, du: i32, dv: i32) -> FruitMask {
        FruitMask::new(
            self.pixels
                .iter()
                .map(|&(u, v)| (u + du, v + dv))
                .collect(),
        )
        .expect("translation preserves non-emptiness")
    }
}

/// Pixel diameter from the bounding box: `max(height, width)`.
pub fn estimate_2d_bbox(bbox: &BoundingBox) -> f64 {
    bbox.height().max(bbox.width())
}

/// Pixel diameter as the largest segment within the mask: the exact
/// maximum pairwise Euclidean distance over all mask pixels.
///
/// Computed with a convex hull and rotating calipers in integer
/// arithmetic, so the result equals the brute-force O(n^2) maximum
/// exactly.
pub fn estimate_2d_lseg(mask: &FruitMask) -> f64 {
    (hull::max_pairwise_distance_squared(mask.pixels()) as f64).sqrt()
}

#[cfg(test)]
pub(crate) use hull::max_pairwise_distance_squared;
