use crate::error::{Error, Result};
use crate::mesh::{Aabb, TriangleMesh};
use crate::spatial::triangle::{self, RayHit};
use crate::{Point, Vector};

pub const DEFAULT_LEAF_CAPACITY: usize = 4;

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    /// First triangle for leaves, right child for interior nodes. The left
    /// child of an interior node is always the next node.
    offset: u32,
    /// Triangle count; zero marks an interior node.
    count: u32,
}

/// Bounding-volume hierarchy over the triangles of a mesh.
///
/// Triangles are copied into leaf order, so the BVH owns everything it needs
/// and can be shared freely between threads.
#[derive(Debug, Clone)]
pub struct TriangleBvh {
    nodes: Vec<Node>,
    triangles: Vec<[Point; 3]>,
    /// Mesh triangle index for each slot in `triangles`.
    source: Vec<u32>,
    leaf_capacity: usize,
}

/// Result of casting one ray through the mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayCrossings {
    pub count: u32,
    pub degenerate: bool,
}

fn triangle_box(t: &[Point; 3]) -> Aabb {
    Aabb::from_points(t.iter())
}

impl TriangleBvh {
    pub fn build(mesh: &TriangleMesh) -> Result<Self> {
        Self::with_leaf_capacity(mesh, DEFAULT_LEAF_CAPACITY)
    }

    pub fn with_leaf_capacity(mesh: &TriangleMesh, leaf_capacity: usize) -> Result<Self> {
        if mesh.is_empty() {
            return Err(Error::EmptyMesh);
        }
        let leaf_capacity = leaf_capacity.max(1);
        let tris: Vec<[Point; 3]> = (0..mesh.triangle_count()).map(|t| mesh.triangle(t)).collect();
        let centroids: Vec<Point> = tris
            .iter()
            .map(|t| Point::from((t[0].coords + t[1].coords + t[2].coords) / 3.0))
            .collect();
        let mut order: Vec<u32> = (0..tris.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * tris.len() / leaf_capacity + 1);
        build_node(&mut nodes, &tris, &centroids, &mut order, 0, leaf_capacity);

        Ok(TriangleBvh {
            nodes,
            triangles: order.iter().map(|&i| tris[i as usize]).collect(),
            source: order,
            leaf_capacity,
        })
    }

    pub fn root_aabb(&self) -> Aabb {
        self.nodes[0].aabb
    }

    pub fn leaf_capacity(&self) -> usize {
        self.leaf_capacity
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Mesh triangle indices per leaf, in traversal order.
    pub fn leaves(&self) -> Vec<Vec<u32>> {
        self.nodes
            .iter()
            .filter(|n| n.count > 0)
            .map(|n| self.source[n.offset as usize..(n.offset + n.count) as usize].to_vec())
            .collect()
    }

    /// Checks that every node box contains its subtree's triangles.
    pub fn check_containment(&self) -> bool {
        self.subtree_ok(0).is_some()
    }

    fn subtree_ok(&self, idx: usize) -> Option<Aabb> {
        let node = &self.nodes[idx];
        let content = if node.count > 0 {
            let range = node.offset as usize..(node.offset + node.count) as usize;
            self.triangles[range]
                .iter()
                .fold(Aabb::empty(), |b, t| b.union(&triangle_box(t)))
        } else {
            let left = self.subtree_ok(idx + 1)?;
            let right = self.subtree_ok(node.offset as usize)?;
            left.union(&right)
        };
        node.aabb.contains_box(&content).then_some(node.aabb)
    }

    /// Counts crossings of the ray `origin + t * direction`, t > 0.
    pub fn count_ray_crossings(&self, origin: &Point, direction: &Vector) -> RayCrossings {
        let inv_dir = direction.map(|d| 1.0 / d);
        let mut result = RayCrossings {
            count: 0,
            degenerate: false,
        };
        let mut stack = Vec::with_capacity(64);
        stack.push(0usize);
        while let Some(idx) = stack.pop() {
            let node = &self.nodes[idx];
            if node.aabb.ray_entry(origin, &inv_dir).is_none() {
                continue;
            }
            if node.count == 0 {
                stack.push(node.offset as usize);
                stack.push(idx + 1);
                continue;
            }
            for tri in &self.triangles[node.offset as usize..(node.offset + node.count) as usize] {
                match triangle::intersect_ray(origin, direction, tri) {
                    RayHit::Miss => {}
                    RayHit::Hit { .. } => result.count += 1,
                    RayHit::Degenerate => {
                        result.count += 1;
                        result.degenerate = true;
                    }
                }
            }
        }
        result
    }

    /// Closest point on the surface and its mesh triangle index.
    pub fn closest_point(&self, query: &Point) -> (Point, u32) {
        let mut best_d2 = f64::INFINITY;
        let mut best = (*query, 0);
        let mut stack: Vec<(usize, f64)> = Vec::with_capacity(64);
        stack.push((0, self.nodes[0].aabb.distance_squared(query)));
        while let Some((idx, box_d2)) = stack.pop() {
            if box_d2 >= best_d2 {
                continue;
            }
            let node = &self.nodes[idx];
            if node.count > 0 {
                let start = node.offset as usize;
                for (slot, tri) in self.triangles[start..start + node.count as usize].iter().enumerate() {
                    let c = triangle::closest_point(query, &tri[0], &tri[1], &tri[2]);
                    let d2 = (query - c).norm_squared();
                    if d2 < best_d2 {
                        best_d2 = d2;
                        best = (c, self.source[start + slot]);
                    }
                }
                continue;
            }
            let left = idx + 1;
            let right = node.offset as usize;
            let dl = self.nodes[left].aabb.distance_squared(query);
            let dr = self.nodes[right].aabb.distance_squared(query);
            // Push the farther child first so the nearer one is explored first.
            if dl <= dr {
                stack.push((right, dr));
                stack.push((left, dl));
            } else {
                stack.push((left, dl));
                stack.push((right, dr));
            }
        }
        best
    }

    /// Unsigned distance from `query` to the surface.
    pub fn closest_distance(&self, query: &Point) -> f64 {
        let (c, _) = self.closest_point(query);
        (query - c).norm()
    }
}

fn build_node(
    nodes: &mut Vec<Node>,
    tris: &[[Point; 3]],
    centroids: &[Point],
    order: &mut [u32],
    offset: usize,
    leaf_capacity: usize,
) -> usize {
    let aabb = order
        .iter()
        .fold(Aabb::empty(), |b, &i| b.union(&triangle_box(&tris[i as usize])));
    let idx = nodes.len();
    nodes.push(Node {
        aabb,
        offset: offset as u32,
        count: order.len() as u32,
    });
    if order.len() <= leaf_capacity {
        return idx;
    }

    let axis = Aabb::from_points(order.iter().map(|&i| &centroids[i as usize])).longest_axis();
    let mid = order.len() / 2;
    order.select_nth_unstable_by(mid, |&a, &b| {
        centroids[a as usize][axis]
            .total_cmp(&centroids[b as usize][axis])
            .then(a.cmp(&b))
    });
    let (left, right) = order.split_at_mut(mid);
    build_node(nodes, tris, centroids, left, offset, leaf_capacity);
    let right_idx = build_node(nodes, tris, centroids, right, offset + mid, leaf_capacity);
    nodes[idx].offset = right_idx as u32;
    nodes[idx].count = 0;
    idx
}
