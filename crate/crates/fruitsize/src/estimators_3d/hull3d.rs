//! Candidate-vertex reduction for the exact 3D diameter.
//!
//! Quickhull over the cloud yields the hull vertex set; a final
//! conservative sweep re-adds any point that is not strictly interior by
//! a scale-relative margin. Diameter endpoints are always extreme points,
//! so the candidate set provably contains them and the pairwise maximum
//! over candidates equals the full O(n^2) brute force bit for bit.
//! Small or degenerate (collinear/coplanar) inputs fall back to the full
//! index set, keeping exactness.

use crate::geometry::Point3;

/// Below this size brute force over all points is cheaper than hull
/// bookkeeping.
const BRUTE_FORCE_LIMIT: usize = 64;

#[derive(Clone, Copy)]
struct Vec3 {
    x: f64,
    y: f64,
    z: f64,
}

impl Vec3 {
    fn from_points(a: &Point3, b: &Point3) -> Self {
        Vec3 {
            x: b.x - a.x,
            y: b.y - a.y,
            z: b.z - a.z,
        }
    }

    fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3 {
            x: self.y * o.z - self.z * o.y,
            y: self.z * o.x - self.x * o.z,
            z: self.x * o.y - self.y * o.x,
        }
    }

    fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

#[derive(Clone)]
struct Face {
    verts: [usize; 3],
    normal: Vec3,
    offset: f64,
    outside: Vec<usize>,
    alive: bool,
}

impl Face {
    fn signed_distance(&self, p: &Point3) -> f64 {
        self.normal.x * p.x + self.normal.y * p.y + self.normal.z * p.z - self.offset
    }
}

fn make_face(points: &[Point3], a: usize, b: usize, c: usize, inside: &Point3) -> Face {
    let ab = Vec3::from_points(&points[a], &points[b]);
    let ac = Vec3::from_points(&points[a], &points[c]);
    let mut normal = ab.cross(&ac);
    let norm = normal.norm();
    if norm > 0.0 {
        normal = Vec3 {
            x: normal.x / norm,
            y: normal.y / norm,
            z: normal.z / norm,
        };
    }
    let mut offset = normal.x * points[a].x + normal.y * points[a].y + normal.z * points[a].z;
    let mut verts = [a, b, c];
    let inside_dist = normal.x * inside.x + normal.y * inside.y + normal.z * inside.z - offset;
    if inside_dist > 0.0 {
        // Flip so the normal points away from the interior reference.
        verts = [a, c, b];
        offset = -offset;
        return Face {
            verts,
            normal: Vec3 {
                x: -normal.x,
                y: -normal.y,
                z: -normal.z,
            },
            offset,
            outside: Vec::new(),
            alive: true,
        };
    }
    Face {
        verts,
        normal,
        offset,
        outside: Vec::new(),
        alive: true,
    }
}

fn coordinate_scale(points: &[Point3]) -> f64 {
    let mut scale = 0.0f64;
    for p in points {
        scale = scale.max(p.x.abs()).max(p.y.abs()).max(p.z.abs());
    }
    scale.max(1.0)
}

/// Initial non-degenerate tetrahedron, or None if the cloud is
/// (near-)collinear or coplanar.
fn initial_tetrahedron(points: &[Point3], tol: f64) -> Option<[usize; 4]> {
    let n = points.len();
    // Farthest pair among the six axis extremes.
    let mut extremes = [0usize; 6];
    for i in 0..n {
        let p = &points[i];
        if p.x < points[extremes[0]].x {
            extremes[0] = i;
        }
        if p.x > points[extremes[1]].x {
            extremes[1] = i;
        }
        if p.y < points[extremes[2]].y {
            extremes[2] = i;
        }
        if p.y > points[extremes[3]].y {
            extremes[3] = i;
        }
        if p.z < points[extremes[4]].z {
            extremes[4] = i;
        }
        if p.z > points[extremes[5]].z {
            extremes[5] = i;
        }
    }
    let (mut a, mut b, mut best) = (0, 0, -1.0);
    for &i in &extremes {
        for &j in &extremes {
            let d = points[i].distance_squared(&points[j]);
            if d > best {
                best = d;
                a = i;
                b = j;
            }
        }
    }
    if best <= tol * tol {
        return None;
    }
    // Farthest point from line (a, b).
    let ab = Vec3::from_points(&points[a], &points[b]);
    let ab_norm = ab.norm();
    let (mut c, mut best) = (a, -1.0);
    for i in 0..n {
        let ap = Vec3::from_points(&points[a], &points[i]);
        let d = ab.cross(&ap).norm() / ab_norm;
        if d > best {
            best = d;
            c = i;
        }
    }
    if best <= tol {
        return None;
    }
    // Farthest point from plane (a, b, c).
    let ac = Vec3::from_points(&points[a], &points[c]);
    let mut normal = ab.cross(&ac);
    let norm = normal.norm();
    normal = Vec3 {
        x: normal.x / norm,
        y: normal.y / norm,
        z: normal.z / norm,
    };
    let base = normal.x * points[a].x + normal.y * points[a].y + normal.z * points[a].z;
    let (mut d, mut best) = (a, -1.0);
    for i in 0..n {
        let dist = (normal.x * points[i].x + normal.y * points[i].y + normal.z * points[i].z
            - base)
            .abs();
        if dist > best {
            best = dist;
            d = i;
        }
    }
    if best <= tol {
        return None;
    }
    Some([a, b, c, d])
}

/// Indices of all points that can participate in the diameter: hull
/// vertices plus every point not strictly interior by the tolerance.
pub(crate) fn diameter_candidates(points: &[Point3]) -> Vec<usize> {
    let n = points.len();
    if n < BRUTE_FORCE_LIMIT {
        return (0..n).collect();
    }
    let scale = coordinate_scale(points);
    let tol = 1e-10 * scale;
    let tetra = match initial_tetrahedron(points, tol) {
        Some(t) => t,
        None => return (0..n).collect(), // degenerate: exact brute force
    };

    let inside = Point3::new(
        (points[tetra[0]].x + points[tetra[1]].x + points[tetra[2]].x + points[tetra[3]].x) / 4.0,
        (points[tetra[0]].y + points[tetra[1]].y + points[tetra[2]].y + points[tetra[3]].y) / 4.0,
        (points[tetra[0]].z + points[tetra[1]].z + points[tetra[2]].z + points[tetra[3]].z) / 4.0,
    );

    let mut faces: Vec<Face> = vec![
        make_face(points, tetra[0], tetra[1], tetra[2], &inside),
        make_face(points, tetra[0], tetra[1], tetra[3], &inside),
        make_face(points, tetra[0], tetra[2], tetra[3], &inside),
        make_face(points, tetra[1], tetra[2], tetra[3], &inside),
    ];

    let mut on_hull = vec![false; n];
    for &i in &tetra {
        on_hull[i] = true;
    }

    // Assign every point to the first face it lies clearly outside of.
    for i in 0..n {
        if on_hull[i] {
            continue;
        }
        let target = faces
            .iter()
            .position(|face| face.signed_distance(&points[i]) > tol);
        if let Some(fi) = target {
            faces[fi].outside.push(i);
        }
    }

    let mut rounds = 0usize;
    loop {
        rounds += 1;
        if rounds > 4 * n + 16 {
            // Numerical stalemate; fall back to exact brute force.
            return (0..n).collect();
        }
        // Face with pending outside points.
        let Some(fi) = faces.iter().position(|f| f.alive && !f.outside.is_empty()) else {
            break;
        };
        // Farthest outside point of that face becomes the next apex.
        let apex = *faces[fi]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                faces[fi]
                    .signed_distance(&points[a])
                    .total_cmp(&faces[fi].signed_distance(&points[b]))
            })
            .unwrap();
        on_hull[apex] = true;

        // All faces visible from the apex die; their boundary is the horizon.
        let mut orphan: Vec<usize> = Vec::new();
        let mut visible_edges: Vec<(usize, usize)> = Vec::new();
        for face in faces.iter_mut().filter(|f| f.alive) {
            if face.signed_distance(&points[apex]) > tol {
                face.alive = false;
                orphan.append(&mut face.outside);
                let [a, b, c] = face.verts;
                visible_edges.push((a, b));
                visible_edges.push((b, c));
                visible_edges.push((c, a));
            }
        }
        let horizon: Vec<(usize, usize)> = visible_edges
            .iter()
            .copied()
            .filter(|&(a, b)| !visible_edges.contains(&(b, a)))
            .collect();

        if horizon.is_empty() {
            // Should not happen for a point outside a closed hull; bail
            // out to the exact path rather than trust a broken horizon.
            return (0..n).collect();
        }

        let first_new = faces.len();
        for &(a, b) in &horizon {
            faces.push(make_face(points, a, b, apex, &inside));
        }
        // Redistribute orphaned points to the new faces.
        orphan.sort_unstable();
        orphan.dedup();
        for i in orphan {
            if i == apex || on_hull[i] {
                continue;
            }
            for fi in first_new..faces.len() {
                if faces[fi].signed_distance(&points[i]) > tol {
                    faces[fi].outside.push(i);
                    break;
                }
            }
        }
        faces.retain(|f| f.alive);
    }

    let live: Vec<&Face> = faces.iter().filter(|f| f.alive).collect();
    if live.is_empty() {
        return (0..n).collect();
    }
    // Conservative sweep: keep any point that is not strictly inside
    // every face by the margin; only clearly interior points are pruned.
    let mut candidates = Vec::new();
    'point: for i in 0..n {
        if on_hull[i] {
            candidates.push(i);
            continue;
        }
        for face in &live {
            if face.signed_distance(&points[i]) > -tol {
                candidates.push(i);
                continue 'point;
            }
        }
    }
    candidates
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn cube_corners_survive_pruning() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut points = Vec::new();
        for x in [0.0, 100.0] {
            for y in [0.0, 100.0] {
                for z in [100.0, 200.0] {
                    points.push(Point3::new(x, y, z));
                }
            }
        }
        for _ in 0..500 {
            points.push(Point3::new(
                rng.gen_range(1.0..99.0),
                rng.gen_range(1.0..99.0),
                rng.gen_range(101.0..199.0),
            ));
        }
        let candidates = diameter_candidates(&points);
        for corner in 0..8 {
            assert!(candidates.contains(&corner), "corner {corner} pruned");
        }
        // Interior points should be mostly gone.
        assert!(candidates.len() < 60, "kept {} candidates", candidates.len());
    }

    #[test]
    fn degenerate_plane_keeps_everything() {
        let mut points = Vec::new();
        for x in 0..30 {
            for y in 0..10 {
                points.push(Point3::new(x as f64, y as f64, 500.0));
            }
        }
        assert_eq!(diameter_candidates(&points).len(), points.len());
    }
}
