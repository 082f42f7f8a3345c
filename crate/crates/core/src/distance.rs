//! Unsigned and signed distance to the mesh surface.

use rayon::prelude::*;

use crate::error::Result;
use crate::occupancy::occupancy;
use crate::spatial::triangle::ORIGIN_TOLERANCE;
use crate::spatial::TriangleBvh;
use crate::Point;

/// Exact unsigned distance for every point, order-aligned with the input.
pub fn udf_batch(bvh: &TriangleBvh, points: &[Point]) -> Vec<f64> {
    points.par_iter().map(|p| bvh.closest_distance(p)).collect()
}

/// Signed distance: negative inside, positive outside, zero on the surface.
pub fn sdf(bvh: &TriangleBvh, p: &Point, seed: u64) -> Result<f64> {
    let d = bvh.closest_distance(p);
    // On the surface the parity test is undefined; the sign does not matter.
    if d <= ORIGIN_TOLERANCE {
        return Ok(d);
    }
    Ok(if occupancy(bvh, p, seed)? { -d } else { d })
}
