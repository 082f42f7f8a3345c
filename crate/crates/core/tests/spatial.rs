mod common;

use common::{knn_rows, mesh_distance, random_points, rng};
use morphoskel::shapes::AnalyticShape;
use morphoskel::spatial::{build_knn_graph, triangle, PointKdTree, TriangleBvh};
use morphoskel::{Point, Vector};
use proptest::prelude::*;
use rand::Rng;

fn torus_mesh() -> morphoskel::TriangleMesh {
    AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (40, 16) }
        .generate_mesh()
        .unwrap()
        .mesh
}

#[test]
fn bvh_closest_distance_matches_brute_force() {
    let mesh = torus_mesh();
    let bvh = TriangleBvh::build(&mesh).unwrap();
    let mut r = rng(1);
    for p in random_points(&mut r, 2000, 1.6) {
        let fast = bvh.closest_distance(&p);
        let slow = mesh_distance(&p, &mesh);
        assert!((fast - slow).abs() < 1e-12, "{p}: {fast} vs {slow}");
    }
}

#[test]
fn bvh_closest_point_lies_on_reported_triangle() {
    let mesh = torus_mesh();
    let bvh = TriangleBvh::build(&mesh).unwrap();
    let mut r = rng(2);
    for p in random_points(&mut r, 500, 1.5) {
        let (q, t) = bvh.closest_point(&p);
        let tri = mesh.triangle(t as usize);
        assert!(triangle::distance_squared(&q, &tri) < 1e-24);
        assert!(((p - q).norm() - bvh.closest_distance(&p)).abs() < 1e-12);
    }
}

#[test]
fn bvh_ray_crossings_match_brute_force() {
    let mesh = torus_mesh();
    let bvh = TriangleBvh::build(&mesh).unwrap();
    let mut r = rng(3);
    for p in random_points(&mut r, 1000, 1.5) {
        let z: f64 = r.random_range(-1.0..1.0);
        let phi: f64 = r.random_range(0.0..std::f64::consts::TAU);
        let s = (1.0 - z * z).sqrt();
        let dir = Vector::new(s * phi.cos(), s * phi.sin(), z);
        let mut count = 0;
        let mut degenerate = false;
        for t in 0..mesh.triangle_count() {
            match triangle::intersect_ray(&p, &dir, &mesh.triangle(t)) {
                triangle::RayHit::Miss => {}
                triangle::RayHit::Hit { .. } => count += 1,
                triangle::RayHit::Degenerate => {
                    count += 1;
                    degenerate = true;
                }
            }
        }
        let c = bvh.count_ray_crossings(&p, &dir);
        assert_eq!((c.count, c.degenerate), (count, degenerate), "{p}");
    }
}

#[test]
fn bvh_boxes_contain_their_triangles() {
    let bvh = TriangleBvh::build(&torus_mesh()).unwrap();
    assert!(bvh.check_containment());
    let mut seen: Vec<u32> = bvh.leaves().concat();
    seen.sort_unstable();
    assert_eq!(seen, (0..bvh.triangle_count() as u32).collect::<Vec<_>>());
}

#[test]
fn knn_graph_matches_brute_force() {
    let mut r = rng(4);
    let points = random_points(&mut r, 700, 1.0);
    for k in [1, 5, 20] {
        let g = build_knn_graph(&points, k).unwrap();
        let expected = knn_rows(&points, k);
        for (i, row) in expected.iter().enumerate() {
            assert_eq!(g.neighbors(i), row.as_slice(), "k={k} row {i}");
        }
    }
}

#[test]
fn lattice_knn_ties_follow_index() {
    // Exact ties everywhere; the tolerant rule must match exact (d, index) order.
    let n = 6;
    let points: Vec<Point> = (0..n * n * n)
        .map(|i| Point::new((i / (n * n)) as f64, ((i / n) % n) as f64, (i % n) as f64))
        .collect();
    let g = build_knn_graph(&points, 20).unwrap();
    let expected = knn_rows(&points, 20);
    for (i, row) in expected.iter().enumerate() {
        assert_eq!(g.neighbors(i), row.as_slice());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn kdtree_knn_is_sorted_and_complete(
        coords in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0), 1..200),
        q in (-12.0f64..12.0, -12.0f64..12.0, -12.0f64..12.0),
        k in 1usize..30,
    ) {
        let points: Vec<Point> = coords.iter().map(|&(x, y, z)| Point::new(x, y, z)).collect();
        let tree = PointKdTree::build(&points);
        let query = Point::new(q.0, q.1, q.2);
        let got = tree.knn(&query, k);
        prop_assert_eq!(got.len(), k.min(points.len()));
        let mut all: Vec<f64> = points.iter().map(|p| (p - query).norm_squared()).collect();
        all.sort_by(f64::total_cmp);
        for (n, expected) in got.iter().zip(&all) {
            prop_assert_eq!(n.distance_squared, *expected);
            prop_assert_eq!(n.distance_squared, (points[n.index as usize] - query).norm_squared());
        }
    }

    #[test]
    fn udf_is_one_lipschitz(
        a in (-2.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0),
        b in (-2.0f64..2.0, -2.0f64..2.0, -1.0f64..1.0),
    ) {
        let mesh = torus_mesh();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        let p = Point::new(a.0, a.1, a.2);
        let q = Point::new(b.0, b.1, b.2);
        let diff = (bvh.closest_distance(&p) - bvh.closest_distance(&q)).abs();
        prop_assert!(diff <= (p - q).norm() + 1e-12);
    }
}
