//! Chamfer and Hausdorff distances between point sets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::spatial::PointKdTree;
use crate::Point;

/// Distance from each point of `from` to its nearest point in `to`.
pub fn nearest_distances(from: &[Point], to: &[Point]) -> Result<Vec<f64>> {
    if from.is_empty() || to.is_empty() {
        return Err(Error::EmptySet);
    }
    let tree = PointKdTree::build(to);
    Ok(from
        .par_iter()
        .map(|p| tree.nearest(p).map_or(f64::INFINITY, |n| n.distance_squared.sqrt()))
        .collect())
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn max(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}

/// Sum of the two directed mean nearest-neighbor distances (non-squared L2).
pub fn chamfer(a: &[Point], b: &[Point]) -> Result<f64> {
    Ok(mean(&nearest_distances(a, b)?) + mean(&nearest_distances(b, a)?))
}

/// Larger of the two directed Hausdorff distances.
pub fn hausdorff(a: &[Point], b: &[Point]) -> Result<f64> {
    Ok(max(&nearest_distances(a, b)?).max(max(&nearest_distances(b, a)?)))
}
