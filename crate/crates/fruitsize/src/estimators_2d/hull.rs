//! 2D convex hull and rotating-calipers diameter over integer lattice
//! points. All predicates are exact i64 arithmetic, so the caliper result
//! matches the brute-force maximum pairwise squared distance bit for bit.

type Pt = (i64, i64);

fn dist_sq(a: Pt, b: Pt) -> i64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    dx * dx + dy * dy
}

/// Cross product of (b - a) x (c - a).
fn cross(a: Pt, b: Pt, c: Pt) -> i64 {
    (b.0 - a.0) * (c.1 - a.1) - (c.0 - a.0) * (b.1 - a.1)
}

/// Monotone-chain convex hull, counter-clockwise, strictly convex
/// (collinear points dropped). Input must be sorted and deduplicated.
fn convex_hull(sorted: &[Pt]) -> Vec<Pt> {
    let n = sorted.len();
    if n <= 2 {
        return sorted.to_vec();
    }
    let mut hull: Vec<Pt> = Vec::with_capacity(2 * n);
    for &p in sorted {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0
        {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Maximum squared pairwise distance via rotating calipers on a strictly
/// convex ccw hull: for each edge the farthest vertex is tracked with a
/// monotone pointer (triangle areas are unimodal per edge), and both edge
/// endpoints are paired with it.
fn caliper_diameter_sq(hull: &[Pt]) -> i64 {
    let n = hull.len();
    match n {
        0 | 1 => 0,
        2 => dist_sq(hull[0], hull[1]),
        _ => {
            let mut best = 0;
            let mut j = 1usize;
            for i in 0..n {
                let i1 = (i + 1) % n;
                loop {
                    let jn = (j + 1) % n;
                    if cross(hull[i], hull[i1], hull[jn]) > cross(hull[i], hull[i1], hull[j])
                    {
                        j = jn;
                    } else {
                        break;
                    }
                }
                best = best
                    .max(dist_sq(hull[i], hull[j]))
                    .max(dist_sq(hull[i1], hull[j]));
            }
            best
        }
    }
}

/// Exact maximum pairwise squared Euclidean distance of a pixel set.
/// `pixels` must already be sorted and deduplicated (the `FruitMask`
/// constructor guarantees this).
pub(crate) fn max_pairwise_distance_squared(pixels: &[(i32, i32)]) -> i64 {
    let pts: Vec<Pt> = pixels.iter().map(|&(u, v)| (u as i64, v as i64)).collect();
    let hull = convex_hull(&pts);
    caliper_diameter_sq(&hull)
}
