//! Inside/outside classification by ray-crossing parity, and generation of
//! candidate points inside a closed surface.

use nalgebra::Isometry3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{bounding_box, Aabb, TriangleMesh};
use crate::spatial::TriangleBvh;
use crate::{Point, Vector};

/// Random re-casts attempted after a degenerate first cast.
pub const MAX_RETRIES: usize = 8;
/// Non-degenerate casts needed before the vote is settled early.
const DECISIVE_CASTS: usize = 3;
/// Box points drawn per RNG stream.
const DRAW_CHUNK: usize = 1 << 16;

/// Parity point-in-mesh test with randomized retry on grazing rays.
#[derive(Debug, Clone, Copy)]
pub struct Occupancy<'a> {
    bvh: &'a TriangleBvh,
    seed: u64,
    bounds: Aabb,
    primary: Vector,
}

impl<'a> Occupancy<'a> {
    pub fn new(bvh: &'a TriangleBvh, seed: u64) -> Self {
        Occupancy {
            bvh,
            seed,
            bounds: bvh.root_aabb(),
            // Not aligned with any axis or axis-plane diagonal, so lattice
            // points rarely graze edges of axis-aligned meshes.
            primary: Vector::new(0.5407, 0.3361, 0.7712).normalize(),
        }
    }

    /// True when `p` is inside the surface.
    pub fn contains(&self, p: &Point) -> Result<bool> {
        if !self.bounds.contains(p) {
            return Ok(false);
        }
        let first = self.bvh.count_ray_crossings(p, &self.primary);
        if !first.degenerate {
            return Ok(first.count % 2 == 1);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(point_seed(self.seed, p));
        let mut inside_votes = 0;
        let mut casts = 0;
        let mut first_vote = None;
        for _ in 0..MAX_RETRIES {
            let dir = random_direction(&mut rng);
            let cast = self.bvh.count_ray_crossings(p, &dir);
            if cast.degenerate {
                continue;
            }
            let inside = cast.count % 2 == 1;
            first_vote.get_or_insert(inside);
            casts += 1;
            inside_votes += inside as usize;
            if casts == DECISIVE_CASTS {
                break;
            }
        }
        match casts {
            0 => Err(Error::DegenerateOccupancy {
                x: p.x,
                y: p.y,
                z: p.z,
            }),
            // A split vote between two casts falls back to the first one.
            2 if inside_votes == 1 => Ok(first_vote.unwrap_or(false)),
            _ => Ok(2 * inside_votes > casts),
        }
    }
}

/// Occupancy of a single point: `true` means inside.
pub fn occupancy(bvh: &TriangleBvh, p: &Point, seed: u64) -> Result<bool> {
    Occupancy::new(bvh, seed).contains(p)
}

fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Per-point RNG seed from the global seed and the exact coordinates.
fn point_seed(seed: u64, p: &Point) -> u64 {
    let mut h = mix64(seed ^ 0x9e3779b97f4a7c15);
    for c in [p.x, p.y, p.z] {
        h = mix64(h ^ c.to_bits());
    }
    h
}

fn random_direction(rng: &mut impl Rng) -> Vector {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    Vector::new(r * phi.cos(), r * phi.sin(), z)
}

/// How a set of candidate points was generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    UniformRandom { seed: u64, box_count: usize },
    Meshgrid { resolution: usize },
}

/// Candidate points inside the surface, optionally with their UDF.
#[derive(Debug, Clone, PartialEq)]
pub struct VolumeSamples {
    pub points: Vec<Point>,
    pub source: SampleSource,
    /// Number of candidates tested before the inside filter.
    pub candidate_count: usize,
    pub udf: Option<Vec<f64>>,
}

impl VolumeSamples {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn set_udf(&mut self, udf: Vec<f64>) -> Result<()> {
        if udf.len() != self.points.len() {
            return Err(Error::LengthMismatch {
                left: self.points.len(),
                right: udf.len(),
            });
        }
        self.udf = Some(udf);
        Ok(())
    }
}

/// `count` i.i.d. uniform points in `aabb`. Each block of draws has its own
/// RNG stream, so the result does not depend on the thread count.
pub fn draw_box_points(aabb: &Aabb, count: usize, seed: u64) -> Vec<Point> {
    let extent = aabb.extent();
    let mut points = vec![Point::origin(); count];
    points
        .par_chunks_mut(DRAW_CHUNK)
        .enumerate()
        .for_each(|(chunk, out)| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(chunk as u64);
            for p in out {
                let u: f64 = rng.random();
                let v: f64 = rng.random();
                let w: f64 = rng.random();
                *p = Point::new(
                    aabb.min.x + u * extent.x,
                    aabb.min.y + v * extent.y,
                    aabb.min.z + w * extent.z,
                );
            }
        });
    points
}

/// Keeps the candidates inside the surface, in their original order.
pub fn filter_inside(bvh: &TriangleBvh, candidates: &[Point], seed: u64) -> Result<Vec<Point>> {
    let occ = Occupancy::new(bvh, seed);
    let kept = candidates
        .par_chunks(DRAW_CHUNK)
        .map(|chunk| {
            let mut inside = Vec::new();
            for p in chunk {
                if occ.contains(p)? {
                    inside.push(*p);
                }
            }
            Ok(inside)
        })
        .collect::<Result<Vec<Vec<Point>>>>()?;
    Ok(kept.concat())
}

pub fn sample_inner_points_random(
    mesh: &TriangleMesh,
    bvh: &TriangleBvh,
    box_count: usize,
    seed: u64,
) -> Result<VolumeSamples> {
    if box_count == 0 {
        return Err(Error::InvalidConfig("box_count must be positive".into()));
    }
    let aabb = bounding_box(mesh, 0.0)?;
    let candidates = draw_box_points(&aabb, box_count, seed);
    let points = filter_inside(bvh, &candidates, seed)?;
    if points.is_empty() {
        return Err(Error::NoInnerPoints);
    }
    Ok(VolumeSamples {
        points,
        source: SampleSource::UniformRandom { seed, box_count },
        candidate_count: box_count,
        udf: None,
    })
}

/// Cell-centered regular lattice, defined in a local frame and placed in the
/// world by a rigid motion.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice {
    /// Lattice bounds in the local frame.
    pub bounds: Aabb,
    /// Cells per axis.
    pub resolution: usize,
    /// Local-to-world motion.
    pub motion: Isometry3<f64>,
}

impl Lattice {
    pub fn new(bounds: Aabb, resolution: usize) -> Self {
        Lattice {
            bounds,
            resolution,
            motion: Isometry3::identity(),
        }
    }

    pub fn len(&self) -> usize {
        self.resolution.pow(3)
    }

    pub fn is_empty(&self) -> bool {
        self.resolution == 0
    }

    /// Cell spacing per axis in the local frame.
    pub fn spacing(&self) -> Vector {
        self.bounds.extent() / self.resolution as f64
    }

    /// Cell centers in row-major order (x slowest, z fastest).
    pub fn points(&self) -> Vec<Point> {
        let r = self.resolution;
        let h = self.spacing();
        let min = self.bounds.min;
        (0..r * r * r)
            .into_par_iter()
            .map(|idx| {
                let (i, j, k) = (idx / (r * r), (idx / r) % r, idx % r);
                let local = Point::new(
                    min.x + (i as f64 + 0.5) * h.x,
                    min.y + (j as f64 + 0.5) * h.y,
                    min.z + (k as f64 + 0.5) * h.z,
                );
                self.motion * local
            })
            .collect()
    }
}

pub fn sample_inner_points_lattice(bvh: &TriangleBvh, lattice: &Lattice, seed: u64) -> Result<VolumeSamples> {
    if lattice.resolution < 2 {
        return Err(Error::InvalidConfig("grid resolution must be at least 2".into()));
    }
    let candidates = lattice.points();
    let points = filter_inside(bvh, &candidates, seed)?;
    if points.is_empty() {
        return Err(Error::NoInnerPoints);
    }
    Ok(VolumeSamples {
        points,
        source: SampleSource::Meshgrid {
            resolution: lattice.resolution,
        },
        candidate_count: candidates.len(),
        udf: None,
    })
}

/// Lattice over the mesh's own bounding box.
pub fn sample_inner_points_grid(mesh: &TriangleMesh, bvh: &TriangleBvh, resolution: usize) -> Result<VolumeSamples> {
    let lattice = Lattice::new(bounding_box(mesh, 0.0)?, resolution);
    sample_inner_points_lattice(bvh, &lattice, 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::fixtures::cube;

    #[test]
    fn cube_center_and_outside() {
        let mesh = cube();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        assert!(occupancy(&bvh, &Point::new(0.5, 0.5, 0.5), 0).unwrap());
        assert!(!occupancy(&bvh, &Point::new(2.0, 0.0, 0.0), 0).unwrap());
        // Inside the box but on the far side of a face is impossible for a
        // cube; check a point just inside a corner instead.
        assert!(occupancy(&bvh, &Point::new(1e-6, 1e-6, 1e-6), 0).unwrap());
    }

    #[test]
    fn degenerate_first_cast_recovers() {
        let mesh = cube();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        let occ = Occupancy::new(&bvh, 7);
        // Place the point so the primary ray exits exactly through a vertex.
        let corner = Point::new(1.0, 1.0, 1.0);
        let p = corner - occ.primary * 0.3;
        assert!(bvh.count_ray_crossings(&p, &occ.primary).degenerate);
        assert!(occ.contains(&p).unwrap());
    }

    #[test]
    fn surface_point_is_degenerate() {
        let mesh = cube();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        assert!(matches!(
            occupancy(&bvh, &Point::new(0.5, 0.3, 0.0), 0),
            Err(Error::DegenerateOccupancy { .. })
        ));
    }

    #[test]
    fn draws_are_deterministic_and_in_box() {
        let aabb = Aabb::new(Point::new(-1.0, 0.0, 2.0), Point::new(1.0, 0.5, 3.0));
        let a = draw_box_points(&aabb, 200_000, 11);
        let b = draw_box_points(&aabb, 200_000, 11);
        assert_eq!(a, b);
        assert!(a.iter().all(|p| aabb.contains(p)));
        assert_ne!(a, draw_box_points(&aabb, 200_000, 12));
    }

    #[test]
    fn cube_keeps_everything() {
        let mesh = cube();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        let s = sample_inner_points_random(&mesh, &bvh, 10_000, 5).unwrap();
        assert_eq!(s.len(), 10_000);
        assert_eq!(s.candidate_count, 10_000);

        let g = sample_inner_points_grid(&mesh, &bvh, 4).unwrap();
        assert_eq!(g.len(), 64);
        assert_eq!(g.points[1], Point::new(0.125, 0.125, 0.375));
    }

    #[test]
    fn grid_resolution_must_be_two() {
        let mesh = cube();
        let bvh = TriangleBvh::build(&mesh).unwrap();
        assert!(sample_inner_points_grid(&mesh, &bvh, 1).is_err());
    }
}
