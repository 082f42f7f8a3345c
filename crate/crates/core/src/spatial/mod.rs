//! Acceleration structures: a triangle BVH for ray casting and closest-point
//! queries, and a k-d tree for nearest-neighbor graphs.

mod bvh;
mod kdtree;
pub mod triangle;

use rayon::prelude::*;

pub use bvh::{RayCrossings, TriangleBvh, DEFAULT_LEAF_CAPACITY};
pub use kdtree::{Neighbor, PointKdTree, TIE_RELATIVE};

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::{Point, Vector};

pub fn build_bvh(mesh: &TriangleMesh) -> Result<TriangleBvh> {
    TriangleBvh::build(mesh)
}

pub fn count_ray_crossings(bvh: &TriangleBvh, origin: &Point, direction: &Vector) -> RayCrossings {
    bvh.count_ray_crossings(origin, direction)
}

pub fn closest_distance(bvh: &TriangleBvh, query: &Point) -> f64 {
    bvh.closest_distance(query)
}

/// Reflexive k-nearest-neighbor graph used as a structuring element.
///
/// Every point's list holds `k + 1` entries: the point itself first, then
/// its `k` nearest neighbors by Euclidean distance (ties by smaller index).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnnGraph {
    k: usize,
    /// Row-major, `k + 1` entries per point.
    neighbors: Vec<u32>,
}

impl KnnGraph {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.neighbors.len() / (self.k + 1)
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[u32] {
        let w = self.k + 1;
        &self.neighbors[i * w..(i + 1) * w]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        self.neighbors.chunks_exact(self.k + 1)
    }

    /// Builds a graph from explicit lists. Each list must have `k + 1`
    /// entries starting with the point's own index.
    pub fn from_lists(k: usize, lists: &[Vec<u32>]) -> Result<Self> {
        let n = lists.len();
        let mut neighbors = Vec::with_capacity(n * (k + 1));
        for (i, list) in lists.iter().enumerate() {
            if list.len() != k + 1 || list[0] as usize != i || list.iter().any(|&j| j as usize >= n) {
                return Err(Error::InvalidConfig(format!(
                    "neighbor list {i} is not a reflexive {k}-NN list"
                )));
            }
            neighbors.extend_from_slice(list);
        }
        Ok(KnnGraph { k, neighbors })
    }
}

pub fn build_knn_graph(points: &[Point], k: usize) -> Result<KnnGraph> {
    if k == 0 || points.len() <= k {
        return Err(Error::TooFewPoints {
            count: points.len(),
            k,
        });
    }
    if points.len() > u32::MAX as usize {
        return Err(Error::InvalidConfig("too many points for a k-NN graph".into()));
    }
    let tree = PointKdTree::build(points);
    let width = k + 1;
    let mut neighbors = vec![0u32; points.len() * width];
    neighbors
        .par_chunks_mut(width)
        .enumerate()
        .for_each_init(
            || Vec::with_capacity(width),
            |buf, (i, row)| {
                tree.knn_into(&points[i], width, buf);
                let own = i as u32;
                row[0] = own;
                // Exact duplicates can push the point itself out of its own
                // list; it always goes first and the rest keep their order.
                let others = buf.iter().filter(|n| n.index != own);
                for (slot, n) in row[1..].iter_mut().zip(others) {
                    *slot = n.index;
                }
            },
        );
    Ok(KnnGraph { k, neighbors })
}
