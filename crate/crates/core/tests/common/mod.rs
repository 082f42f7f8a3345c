//! Brute-force reference implementations shared by the integration tests.
#![allow(dead_code)]

use morphoskel::{Point, Vector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut impl Rng, n: usize, half: f64) -> Vec<Point> {
    (0..n)
        .map(|_| {
            Point::new(
                rng.random_range(-half..half),
                rng.random_range(-half..half),
                rng.random_range(-half..half),
            )
        })
        .collect()
}

pub fn segment_distance(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Plane projection when it lands inside the triangle, else the nearest edge.
pub fn point_triangle_distance(p: &Point, tri: &[Point; 3]) -> f64 {
    let [a, b, c] = tri;
    let n: Vector = (b - a).cross(&(c - a));
    let n2 = n.norm_squared();
    let q = p - n * ((p - a).dot(&n) / n2);
    // Signed sub-areas against the face normal.
    let inside = [(a, b), (b, c), (c, a)]
        .iter()
        .all(|(u, v)| (*v - *u).cross(&(q - *u)).dot(&n) >= 0.0);
    if inside {
        (p - q).norm()
    } else {
        segment_distance(p, a, b)
            .min(segment_distance(p, b, c))
            .min(segment_distance(p, c, a))
    }
}

pub fn mesh_distance(p: &Point, mesh: &morphoskel::TriangleMesh) -> f64 {
    (0..mesh.triangle_count())
        .map(|t| point_triangle_distance(p, &mesh.triangle(t)))
        .fold(f64::INFINITY, f64::min)
}

/// Reflexive k-NN rows: self first, then the k nearest others by
/// (squared distance, index).
pub fn knn_rows(points: &[Point], k: usize) -> Vec<Vec<u32>> {
    (0..points.len())
        .map(|i| {
            let mut others: Vec<(f64, usize)> = (0..points.len())
                .filter(|&j| j != i)
                .map(|j| ((points[i] - points[j]).norm_squared(), j))
                .collect();
            others.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
            std::iter::once(i as u32)
                .chain(others.iter().take(k).map(|&(_, j)| j as u32))
                .collect()
        })
        .collect()
}

pub fn brute_chamfer(a: &[Point], b: &[Point]) -> f64 {
    let directed = |x: &[Point], y: &[Point]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .sum::<f64>()
            / x.len() as f64
    };
    directed(a, b) + directed(b, a)
}

pub fn brute_hausdorff(a: &[Point], b: &[Point]) -> f64 {
    let directed = |x: &[Point], y: &[Point]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}
