use crate::mesh::Aabb;
use crate::Point;

const LEAF_SIZE: usize = 8;

/// Squared distances closer than `TIE_RELATIVE * diagonal²` of the point set
/// are treated as equal and ordered by index. This keeps neighbor lists on
/// regular lattices stable under round-off (e.g. after a rigid motion).
pub const TIE_RELATIVE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: u32,
    pub distance_squared: f64,
}

#[derive(Debug, Clone)]
enum KdNode {
    Leaf { start: u32, end: u32 },
    Split { axis: u8, value: f64, right: u32 },
}

/// Static balanced k-d tree over a 3D point set.
#[derive(Debug, Clone)]
pub struct PointKdTree {
    nodes: Vec<KdNode>,
    /// Points permuted into leaf order.
    points: Vec<Point>,
    /// Original index of each permuted point.
    indices: Vec<u32>,
    tie_eps: f64,
}

impl PointKdTree {
    pub fn build(points: &[Point]) -> Self {
        let bounds = Aabb::from_points(points);
        let tie_eps = if points.is_empty() {
            0.0
        } else {
            TIE_RELATIVE * bounds.extent().norm_squared()
        };
        let mut indices: Vec<u32> = (0..points.len() as u32).collect();
        let mut nodes = Vec::with_capacity(2 * points.len() / LEAF_SIZE + 1);
        if !points.is_empty() {
            build_node(&mut nodes, points, &mut indices, 0);
        }
        PointKdTree {
            nodes,
            points: indices.iter().map(|&i| points[i as usize]).collect(),
            indices,
            tie_eps,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn tie_epsilon(&self) -> f64 {
        self.tie_eps
    }

    /// The `k` nearest points to `query`, nearest first, ties by index.
    pub fn knn(&self, query: &Point, k: usize) -> Vec<Neighbor> {
        let mut out = Vec::with_capacity(k);
        self.knn_into(query, k, &mut out);
        out
    }

    /// Like [`knn`](Self::knn) but reuses `out`.
    pub fn knn_into(&self, query: &Point, k: usize, out: &mut Vec<Neighbor>) {
        out.clear();
        if k == 0 || self.nodes.is_empty() {
            return;
        }
        let mut search = Search {
            tree: self,
            query,
            k,
            best: out,
        };
        search.visit(0);
    }

    pub fn nearest(&self, query: &Point) -> Option<Neighbor> {
        let mut out = Vec::with_capacity(1);
        self.knn_into(query, 1, &mut out);
        out.first().copied()
    }
}

/// Strict "comes before" under the tolerant tie rule.
#[inline]
fn precedes(a: &Neighbor, b: &Neighbor, eps: f64) -> bool {
    if (a.distance_squared - b.distance_squared).abs() <= eps {
        a.index < b.index
    } else {
        a.distance_squared < b.distance_squared
    }
}

struct Search<'a> {
    tree: &'a PointKdTree,
    query: &'a Point,
    k: usize,
    best: &'a mut Vec<Neighbor>,
}

impl Search<'_> {
    fn worst(&self) -> f64 {
        if self.best.len() < self.k {
            f64::INFINITY
        } else {
            self.best[self.k - 1].distance_squared
        }
    }

    fn offer(&mut self, candidate: Neighbor) {
        let eps = self.tree.tie_eps;
        let full = self.best.len() == self.k;
        if full && !precedes(&candidate, &self.best[self.k - 1], eps) {
            return;
        }
        if full {
            self.best.pop();
        }
        let mut pos = self.best.len();
        while pos > 0 && precedes(&candidate, &self.best[pos - 1], eps) {
            pos -= 1;
        }
        self.best.insert(pos, candidate);
    }

    fn visit(&mut self, idx: usize) {
        match self.tree.nodes[idx] {
            KdNode::Leaf { start, end } => {
                for slot in start as usize..end as usize {
                    let d2 = (self.tree.points[slot] - self.query).norm_squared();
                    self.offer(Neighbor {
                        index: self.tree.indices[slot],
                        distance_squared: d2,
                    });
                }
            }
            KdNode::Split { axis, value, right } => {
                let diff = self.query[axis as usize] - value;
                let (near, far) = if diff < 0.0 {
                    (idx + 1, right as usize)
                } else {
                    (right as usize, idx + 1)
                };
                self.visit(near);
                if diff * diff <= self.worst() + self.tree.tie_eps {
                    self.visit(far);
                }
            }
        }
    }
}

fn build_node(nodes: &mut Vec<KdNode>, points: &[Point], indices: &mut [u32], offset: usize) -> usize {
    let idx = nodes.len();
    if indices.len() <= LEAF_SIZE {
        nodes.push(KdNode::Leaf {
            start: offset as u32,
            end: (offset + indices.len()) as u32,
        });
        return idx;
    }
    let bounds = Aabb::from_points(indices.iter().map(|&i| &points[i as usize]));
    let axis = bounds.longest_axis();
    let mid = indices.len() / 2;
    indices.select_nth_unstable_by(mid, |&a, &b| {
        points[a as usize][axis]
            .total_cmp(&points[b as usize][axis])
            .then(a.cmp(&b))
    });
    let value = points[indices[mid] as usize][axis];
    nodes.push(KdNode::Split {
        axis: axis as u8,
        value,
        right: 0,
    });
    let (left, right) = indices.split_at_mut(mid);
    build_node(nodes, points, left, offset);
    let right_idx = build_node(nodes, points, right, offset + mid);
    if let KdNode::Split { right, .. } = &mut nodes[idx] {
        *right = right_idx as u32;
    }
    idx
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_knn(points: &[Point], q: &Point, k: usize) -> Vec<u32> {
        let mut all: Vec<(f64, u32)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| ((p - q).norm_squared(), i as u32))
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.into_iter().take(k).map(|(_, i)| i).collect()
    }

    #[test]
    fn matches_brute_force_on_random_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let points: Vec<Point> = (0..500)
            .map(|_| Point::new(rng.random(), rng.random(), rng.random()))
            .collect();
        let tree = PointKdTree::build(&points);
        for _ in 0..200 {
            let q = Point::new(rng.random_range(-0.2..1.2), rng.random(), rng.random());
            for k in [1, 5, 21] {
                let got: Vec<u32> = tree.knn(&q, k).iter().map(|n| n.index).collect();
                assert_eq!(got, brute_knn(&points, &q, k));
            }
        }
    }

    #[test]
    fn k_larger_than_set_returns_everything() {
        let points = vec![Point::new(0., 0., 0.), Point::new(1., 0., 0.)];
        let tree = PointKdTree::build(&points);
        assert_eq!(tree.knn(&Point::new(0.9, 0., 0.), 5).len(), 2);
        assert_eq!(tree.nearest(&Point::new(0.9, 0., 0.)).unwrap().index, 1);
        assert!(PointKdTree::build(&[]).nearest(&Point::origin()).is_none());
    }

    #[test]
    fn duplicate_points_order_by_index() {
        let points = vec![Point::new(1., 1., 1.); 20];
        let tree = PointKdTree::build(&points);
        let got: Vec<u32> = tree.knn(&Point::origin(), 4).iter().map(|n| n.index).collect();
        assert_eq!(got, vec![0, 1, 2, 3]);
    }
}
