//! Depth-threshold fallback segmenter.
//!
//! Used when a fruit has no annotated mask: take the valid-depth pixels
//! inside the box, keep those within +/-10% of their median depth and
//! return the largest 4-connected component. A plain heuristic for
//! fruit-against-background separation, not a learned segmenter.

use super::{DatasetError, Frame};
use crate::estimators_2d::{BoundingBox, FruitMask};

const DEPTH_BAND_FRACTION: f64 = 0.10;

/// Segments the fruit inside `bbox` by depth proximity to the median.
pub fn fallback_segment(frame: &Frame, bbox: &BoundingBox) -> Result<FruitMask, DatasetError> {
    let u_lo = (bbox.u_min.ceil() as i64).max(0);
    let u_hi = (bbox.u_max.floor() as i64).min(frame.width as i64 - 1);
    let v_lo = (bbox.v_min.ceil() as i64).max(0);
    let v_hi = (bbox.v_max.floor() as i64).min(frame.height as i64 - 1);
    if u_lo > u_hi || v_lo > v_hi {
        return Err(DatasetError::Schema(format!(
            "box [{}, {}, {}, {}] lies outside the {}x{} frame",
            bbox.u_min, bbox.v_min, bbox.u_max, bbox.v_max, frame.width, frame.height
        )));
    }

    let scale = frame.intrinsics.depth_scale;
    let width = (u_hi - u_lo + 1) as usize;
    let height = (v_hi - v_lo + 1) as usize;
    let mut depths: Vec<f64> = Vec::new();
    let mut grid = vec![f64::NAN; width * height];
    for v in v_lo..=v_hi {
        for u in u_lo..=u_hi {
            if let Some(z) = frame.depth.depth_mm(u, v, scale) {
                grid[(v - v_lo) as usize * width + (u - u_lo) as usize] = z;
                depths.push(z);
            }
        }
    }
    if depths.is_empty() {
        return Err(DatasetError::EmptyMask(format!(
            "no valid depth inside box [{}, {}, {}, {}]",
            bbox.u_min, bbox.v_min, bbox.u_max, bbox.v_max
        )));
    }
    depths.sort_by(f64::total_cmp);
    let median = depths[(depths.len() - 1) / 2];
    let band = DEPTH_BAND_FRACTION * median;

    let in_band = |idx: usize| -> bool {
        let z = grid[idx];
        z.is_finite() && (z - median).abs() <= band
    };

    // Largest 4-connected component; ties resolve to the first component
    // found in row-major scan order.
    let mut visited = vec![false; width * height];
    let mut best: Vec<usize> = Vec::new();
    let mut stack = Vec::new();
    for start in 0..grid.len() {
        if visited[start] || !in_band(start) {
            continue;
        }
        let mut component = Vec::new();
        visited[start] = true;
        stack.push(start);
        while let Some(idx) = stack.pop() {
            component.push(idx);
            let (x, y) = (idx % width, idx / width);
            let mut try_push = |nx: usize, ny: usize| {
                let nidx = ny * width + nx;
                if !visited[nidx] && in_band(nidx) {
                    visited[nidx] = true;
                    stack.push(nidx);
                }
            };
            if x > 0 {
                try_push(x - 1, y);
            }
            if x + 1 < width {
                try_push(x + 1, y);
            }
            if y > 0 {
                try_push(x, y - 1);
            }
            if y + 1 < height {
                try_push(x, y + 1);
            }
        }
        if component.len() > best.len() {
            best = component;
        }
    }

    let pixels: Vec<(i32, i32)> = best
        .into_iter()
        .map(|idx| {
            (
                (u_lo + (idx % width) as i64) as i32,
                (v_lo + (idx / width) as i64) as i32,
            )
        })
        .collect();
    FruitMask::new(pixels).map_err(|_| {
        DatasetError::EmptyMask("depth band produced an empty component".to_string())
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::DepthMap;
    use crate::geometry::CameraIntrinsics;

    fn frame_from_depth(width: u32, height: u32, data: Vec<u16>) -> Frame {
        Frame {
            frame_id: "t".into(),
            width,
            height,
            depth: DepthMap::new(width, height, data).unwrap(),
            intrinsics: CameraIntrinsics::new(
                600.0,
                (width as f64 / 2.0, height as f64 / 2.0),
                1.0,
            )
            .unwrap(),
            fruits: vec![],
            capture_date: None,
            rgb_path: "rgb.png".into(),
            depth_path: "depth.png".into(),
        }
    }

    #[test]
    fn flat_wall_returns_whole_box() {
        let frame = frame_from_depth(40, 30, vec![900; 40 * 30]);
        let bbox = BoundingBox::new(5.0, 5.0, 14.0, 12.0).unwrap();
        let mask = fallback_segment(&frame, &bbox).unwrap();
        assert_eq!(mask.len(), 10 * 8);
        assert_eq!(mask.extent(), (5, 5, 14, 12));
    }

    #[test]
    fn pure_invalid_depth_is_empty_mask_error() {
        let frame = frame_from_depth(20, 20, vec![0; 400]);
        let bbox = BoundingBox::new(2.0, 2.0, 10.0, 10.0).unwrap();
        assert!(matches!(
            fallback_segment(&frame, &bbox),
            Err(DatasetError::EmptyMask(_))
        ));
    }

    #[test]
    fn box_outside_frame_is_rejected() {
        let frame = frame_from_depth(20, 20, vec![500; 400]);
        let bbox = BoundingBox::new(25.0, 2.0, 40.0, 10.0).unwrap();
        assert!(matches!(
            fallback_segment(&frame, &bbox),
            Err(DatasetError::Schema(_))
        ));
    }

    #[test]
    fn picks_object_against_far_background() {
        // 12x12 blob at depth 800 against a wall 500 mm farther. The box
        // is tight around the object, as a detection box would be, so
        // the median depth lands on the object.
        let (w, h) = (50u32, 40u32);
        let mut data = vec![1300u16; (w * h) as usize];
        let mut expected = Vec::new();
        for v in 10..22 {
            for u in 20..32 {
                data[(v * w + u) as usize] = 800;
                expected.push((u as i32, v as i32));
            }
        }
        let frame = frame_from_depth(w, h, data);
        let bbox = BoundingBox::new(18.0, 8.0, 33.0, 23.0).unwrap();
        let mask = fallback_segment(&frame, &bbox).unwrap();
        expected.sort_unstable();
        assert_eq!(mask.pixels(), expected.as_slice());
    }

    #[test]
    fn keeps_largest_component_only() {
        // Two blobs at the same depth: 3x3 and 2x2; the larger one wins.
        let (w, h) = (30u32, 20u32);
        let mut data = vec![0u16; (w * h) as usize];
        for v in 2..5 {
            for u in 2..5 {
                data[(v * w + u) as usize] = 700;
            }
        }
        for v in 10..12 {
            for u in 10..12 {
                data[(v * w + u) as usize] = 700;
            }
        }
        let frame = frame_from_depth(w, h, data);
        let bbox = BoundingBox::new(0.0, 0.0, 29.0, 19.0).unwrap();
        let mask = fallback_segment(&frame, &bbox).unwrap();
        assert_eq!(mask.len(), 9);
        assert_eq!(mask.extent(), (2, 2, 4, 4));
    }
}
