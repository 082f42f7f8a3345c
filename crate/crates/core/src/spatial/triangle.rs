//! Point–triangle and ray–triangle primitives.

use crate::{Point, Vector};

/// Rays whose direction is this close to the triangle plane (in
/// determinant terms) cannot be intersected reliably.
pub const PARALLEL_DET: f64 = 1e-12;
/// Barycentric distance to an edge below which a hit counts as grazing.
pub const EDGE_TOLERANCE: f64 = 1e-9;
/// Hits closer than this to the ray origin mean the origin is on the surface.
pub const ORIGIN_TOLERANCE: f64 = 1e-12;

/// Closest point to `p` on triangle `abc` (Voronoi-region walk).
pub fn closest_point(p: &Point, a: &Point, b: &Point, c: &Point) -> Point {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return *a;
    }

    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return *b;
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }

    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return *c;
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }

    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }

    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

pub fn distance_squared(p: &Point, tri: &[Point; 3]) -> f64 {
    (p - closest_point(p, &tri[0], &tri[1], &tri[2])).norm_squared()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayHit {
    Miss,
    Hit { t: f64 },
    /// The ray grazes an edge or vertex, runs in the triangle plane, or
    /// starts on the triangle; the crossing cannot be counted reliably.
    Degenerate,
}

/// Möller–Trumbore intersection for the half-line `origin + t * dir`, t > 0.
pub fn intersect_ray(origin: &Point, dir: &Vector, tri: &[Point; 3]) -> RayHit {
    let e1 = tri[1] - tri[0];
    let e2 = tri[2] - tri[0];
    let pvec = dir.cross(&e2);
    let det = e1.dot(&pvec);
    let tvec = origin - tri[0];

    if det.abs() < PARALLEL_DET {
        // Parallel to the plane: only a problem if the ray lies in it.
        let normal = e1.cross(&e2);
        let offset = tvec.dot(&normal) / normal.norm();
        return if offset.abs() < EDGE_TOLERANCE {
            RayHit::Degenerate
        } else {
            RayHit::Miss
        };
    }

    let inv = 1.0 / det;
    let u = tvec.dot(&pvec) * inv;
    if !(-EDGE_TOLERANCE..=1.0 + EDGE_TOLERANCE).contains(&u) {
        return RayHit::Miss;
    }
    let qvec = tvec.cross(&e1);
    let v = dir.dot(&qvec) * inv;
    if v < -EDGE_TOLERANCE || u + v > 1.0 + EDGE_TOLERANCE {
        return RayHit::Miss;
    }
    let t = e2.dot(&qvec) * inv;
    if t < -ORIGIN_TOLERANCE {
        return RayHit::Miss;
    }
    if t <= ORIGIN_TOLERANCE
        || u < EDGE_TOLERANCE
        || v < EDGE_TOLERANCE
        || u + v > 1.0 - EDGE_TOLERANCE
    {
        return RayHit::Degenerate;
    }
    RayHit::Hit { t }
}
