//! Run-length encoding of binary masks.
//!
//! A mask is encoded over its tight integer extent box: `origin` is the
//! top-left lattice point, `size` the (width, height) of the box, and
//! `counts` a space-separated list of run lengths over the row-major
//! bitmap, alternating background/foreground and starting with
//! background (a leading 0 when the first pixel is foreground).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RleError {
    #[error("malformed run count '{0}'")]
    BadCount(String),
    #[error("run counts sum to {got}, expected {expected} for a {width}x{height} mask")]
    LengthMismatch {
        got: usize,
        expected: usize,
        width: u32,
        height: u32,
    },
    #[error("empty mask cannot be encoded")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RleMask {
    /// Top-left lattice point (u, v) of the encoded box.
    pub origin: (i32, i32),
    /// (width, height) of the encoded box in pixels.
    pub size: (u32, u32),
    /// Space-separated run lengths, background first.
    pub counts: String,
}

/// Encodes a sorted, deduplicated pixel set (as produced by `FruitMask`).
pub fn encode(pixels: &[(i32, i32)]) -> Result<RleMask, RleError> {
    if pixels.is_empty() {
        return Err(RleError::Empty);
    }
    let u_min = pixels.iter().map(|p| p.0).min().unwrap();
    let u_max = pixels.iter().map(|p| p.0).max().unwrap();
    let v_min = pixels.iter().map(|p| p.1).min().unwrap();
    let v_max = pixels.iter().map(|p| p.1).max().unwrap();
    let width = (u_max - u_min + 1) as u32;
    let height = (v_max - v_min + 1) as u32;

    let mut bitmap = vec![false; (width * height) as usize];
    for &(u, v) in pixels {
        let idx = (v - v_min) as usize * width as usize + (u - u_min) as usize;
        bitmap[idx] = true;
    }

    let mut counts: Vec<usize> = Vec::new();
    let mut current = false; // runs start with background
    let mut run = 0usize;
    for bit in bitmap {
        if bit == current {
            run += 1;
        } else {
            counts.push(run);
            current = bit;
            run = 1;
        }
    }
    counts.push(run);

    Ok(RleMask {
        origin: (u_min, v_min),
        size: (width, height),
        counts: counts
            .iter()
            .map(usize::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    })
}

/// Decodes back to absolute pixel coordinates in row-major order.
pub fn decode(rle: &RleMask) -> Result<Vec<(i32, i32)>, RleError> {
    let (width, height) = rle.size;
    let expected = width as usize * height as usize;
    let mut pixels = Vec::new();
    let mut pos = 0usize;
    let mut foreground = false;
    for token in rle.counts.split_whitespace() {
        let run: usize = token
            .parse()
            .map_err(|_| RleError::BadCount(token.to_string()))?;
        if foreground {
            for k in pos..pos + run {
                if k >= expected {
                    break;
                }
                let u = rle.origin.0 + (k % width as usize) as i32;
                let v = rle.origin.1 + (k / width as usize) as i32;
                pixels.push((u, v));
            }
        }
        pos += run;
        foreground = !foreground;
    }
    if pos != expected {
        return Err(RleError::LengthMismatch {
            got: pos,
            expected,
            width,
            height,
        });
    }
    Ok(pixels)
}
