//! Analytic test shapes with closed-form skeletons.
//!
//! Each shape tessellates to a watertight mesh and knows its exact inside
//! test, distance to the true surface and distance to the true medial set, so
//! pipeline output can be scored without reference data.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::TriangleMesh;
use crate::morphology::Skeleton;
use crate::spatial::triangle;
use crate::{Point, Vector};

/// Largest triangle count any generator will produce.
pub const MAX_TRIANGLES: usize = 5_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AnalyticShape {
    /// Icosphere centered at the origin.
    Sphere { radius: f64, subdivisions: u32 },
    /// Box centered at the origin with the given edge lengths.
    Box { size: [f64; 3] },
    /// Torus around the z axis; `segments` = (around the axis, around the tube).
    Torus { major: f64, minor: f64, segments: (usize, usize) },
    /// Cylinder of length `height` along z capped by hemispheres;
    /// `segments` = (around the axis, rings per hemisphere).
    Capsule { radius: f64, height: f64, segments: (usize, usize) },
}

/// A generated mesh with a bound on its distance from the true surface.
#[derive(Debug, Clone)]
pub struct TessellatedShape {
    pub mesh: TriangleMesh,
    /// Hausdorff-style bound between mesh and analytic surface.
    pub max_deviation: f64,
}

/// Mean and maximum skeleton error over a set of sphere centers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkeletonError {
    pub mean: f64,
    pub max: f64,
}

fn unsupported(shape: &'static str, detail: impl Into<String>) -> Error {
    Error::UnsupportedResolution {
        shape,
        detail: detail.into(),
    }
}

fn distance_to_segment(p: &Point, a: &Point, b: &Point) -> f64 {
    let ab = b - a;
    let t = ((p - a).dot(&ab) / ab.norm_squared()).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

impl AnalyticShape {
    pub fn name(&self) -> &'static str {
        match self {
            AnalyticShape::Sphere { .. } => "sphere",
            AnalyticShape::Box { .. } => "box",
            AnalyticShape::Torus { .. } => "torus",
            AnalyticShape::Capsule { .. } => "capsule",
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match *self {
            AnalyticShape::Sphere { radius, .. } => p.coords.norm() < radius,
            AnalyticShape::Box { size } => (0..3).all(|i| p[i].abs() < 0.5 * size[i]),
            AnalyticShape::Torus { major, minor, .. } => torus_tube_distance(p, major) < minor,
            AnalyticShape::Capsule { radius, height, .. } => capsule_axis_distance(p, height) < radius,
        }
    }

    /// Unsigned distance to the analytic surface.
    pub fn surface_distance(&self, p: &Point) -> f64 {
        match *self {
            AnalyticShape::Sphere { radius, .. } => (p.coords.norm() - radius).abs(),
            AnalyticShape::Box { size } => {
                let q = Vector::new(
                    p.x.abs() - 0.5 * size[0],
                    p.y.abs() - 0.5 * size[1],
                    p.z.abs() - 0.5 * size[2],
                );
                if q.max() <= 0.0 {
                    -q.max()
                } else {
                    q.map(|v| v.max(0.0)).norm()
                }
            }
            AnalyticShape::Torus { major, minor, .. } => (torus_tube_distance(p, major) - minor).abs(),
            AnalyticShape::Capsule { radius, height, .. } => (capsule_axis_distance(p, height) - radius).abs(),
        }
    }

    /// Distance from `p` to the analytic skeleton (medial set).
    pub fn skeleton_distance(&self, p: &Point) -> f64 {
        match *self {
            AnalyticShape::Sphere { .. } => p.coords.norm(),
            AnalyticShape::Box { size } => box_medial_distance(size, p),
            AnalyticShape::Torus { major, .. } => torus_tube_distance(p, major),
            AnalyticShape::Capsule { height, .. } => capsule_axis_distance(p, height),
        }
    }

    pub fn generate_mesh(&self) -> Result<TessellatedShape> {
        match *self {
            AnalyticShape::Sphere { radius, subdivisions } => icosphere(radius, subdivisions),
            AnalyticShape::Box { size } => box_mesh(size),
            AnalyticShape::Torus { major, minor, segments } => torus(major, minor, segments),
            AnalyticShape::Capsule { radius, height, segments } => capsule(radius, height, segments),
        }
    }

    pub fn analytic_skeleton_error(&self, skeleton: &Skeleton) -> Result<SkeletonError> {
        skeleton_error(self, &skeleton.centers())
    }
}

/// Mean and max of `skeleton_distance` over `centers`.
pub fn skeleton_error(shape: &AnalyticShape, centers: &[Point]) -> Result<SkeletonError> {
    if centers.is_empty() {
        return Err(Error::EmptySkeleton);
    }
    let d: Vec<f64> = centers.iter().map(|c| shape.skeleton_distance(c)).collect();
    Ok(SkeletonError {
        mean: d.iter().sum::<f64>() / d.len() as f64,
        max: d.iter().copied().fold(0.0, f64::max),
    })
}

fn torus_tube_distance(p: &Point, major: f64) -> f64 {
    (p.x.hypot(p.y) - major).hypot(p.z)
}

fn capsule_axis_distance(p: &Point, height: f64) -> f64 {
    let z = p.z.clamp(-0.5 * height, 0.5 * height);
    (p - Point::new(0.0, 0.0, z)).norm()
}

fn check_size(shape: &'static str, triangles: usize) -> Result<()> {
    if triangles > MAX_TRIANGLES {
        return Err(unsupported(shape, format!("{triangles} triangles exceeds {MAX_TRIANGLES}")));
    }
    Ok(())
}

fn positive(shape: &'static str, what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(unsupported(shape, format!("{what} must be positive, got {v}")))
    }
}

fn icosphere(radius: f64, subdivisions: u32) -> Result<TessellatedShape> {
    positive("sphere", "radius", radius)?;
    if subdivisions > 9 {
        return Err(unsupported("sphere", format!("subdivision level {subdivisions} > 9")));
    }
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<Point> = [
        (-1.0, t, 0.0), (1.0, t, 0.0), (-1.0, -t, 0.0), (1.0, -t, 0.0),
        (0.0, -1.0, t), (0.0, 1.0, t), (0.0, -1.0, -t), (0.0, 1.0, -t),
        (t, 0.0, -1.0), (t, 0.0, 1.0), (-t, 0.0, -1.0), (-t, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Point::from(Vector::new(x, y, z).normalize()))
    .collect();
    let mut faces: Vec<[u32; 3]> = vec![
        [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
        [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
        [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
        [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
        let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Point>| {
            *midpoints.entry((a.min(b), a.max(b))).or_insert_with(|| {
                let m = (verts[a as usize].coords + verts[b as usize].coords).normalize();
                verts.push(Point::from(m));
                (verts.len() - 1) as u32
            })
        };
        let mut next = Vec::with_capacity(faces.len() * 4);
        for [a, b, c] in faces {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        faces = next;
    }
    let verts: Vec<Point> = verts.into_iter().map(|p| Point::from(p.coords * radius)).collect();
    let mesh = TriangleMesh::new(verts, faces)?;
    // Vertices lie on the sphere and every face is inside it, so the largest
    // gap is the radius minus the smallest face distance from the center.
    let inradius = (0..mesh.triangle_count())
        .map(|t| triangle::distance_squared(&Point::origin(), &mesh.triangle(t)).sqrt())
        .fold(f64::INFINITY, f64::min);
    Ok(TessellatedShape {
        mesh,
        max_deviation: radius - inradius,
    })
}

/// Outward-wound box mesh; shared with tests and fixtures.
fn box_mesh(size: [f64; 3]) -> Result<TessellatedShape> {
    for s in size {
        positive("box", "edge length", s)?;
    }
    let verts = (0..8)
        .map(|i| {
            Point::new(
                if i & 1 == 0 { -0.5 } else { 0.5 } * size[0],
                if i & 2 == 0 { -0.5 } else { 0.5 } * size[1],
                if i & 4 == 0 { -0.5 } else { 0.5 } * size[2],
            )
        })
        .collect();
    let faces = vec![
        [0, 2, 1], [1, 2, 3], [4, 5, 6], [5, 7, 6],
        [0, 1, 4], [1, 5, 4], [2, 6, 3], [3, 6, 7],
        [0, 4, 2], [2, 4, 6], [1, 3, 5], [3, 7, 5],
    ];
    Ok(TessellatedShape {
        mesh: TriangleMesh::new(verts, faces)?,
        max_deviation: 0.0,
    })
}

fn torus(major: f64, minor: f64, (around, tube): (usize, usize)) -> Result<TessellatedShape> {
    positive("torus", "major radius", major)?;
    positive("torus", "minor radius", minor)?;
    if minor >= major {
        return Err(unsupported("torus", "minor radius must be below the major radius"));
    }
    if around < 3 || tube < 3 {
        return Err(unsupported("torus", format!("{around}x{tube} segments; need at least 3x3")));
    }
    check_size("torus", around.saturating_mul(tube).saturating_mul(2))?;
    let mut verts = Vec::with_capacity(around * tube);
    for i in 0..around {
        let theta = TAU * i as f64 / around as f64;
        for j in 0..tube {
            let phi = TAU * j as f64 / tube as f64;
            let rho = major + minor * phi.cos();
            verts.push(Point::new(rho * theta.cos(), rho * theta.sin(), minor * phi.sin()));
        }
    }
    let id = |i: usize, j: usize| ((i % around) * tube + (j % tube)) as u32;
    let mut faces = Vec::with_capacity(2 * around * tube);
    for i in 0..around {
        for j in 0..tube {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            faces.push([a, b, c]);
            faces.push([a, c, d]);
        }
    }
    // Chord sagitta around the axis (worst on the outer equator) plus the
    // sagitta around the tube, doubled for the non-planar quad split.
    let max_deviation = (major + minor) * (1.0 - (PI / around as f64).cos())
        + 2.0 * minor * (1.0 - (PI / tube as f64).cos());
    Ok(TessellatedShape {
        mesh: TriangleMesh::new(verts, faces)?,
        max_deviation,
    })
}

fn capsule(radius: f64, height: f64, (around, rings): (usize, usize)) -> Result<TessellatedShape> {
    positive("capsule", "radius", radius)?;
    positive("capsule", "height", height)?;
    if around < 3 || rings < 1 {
        return Err(unsupported("capsule", format!("{around}x{rings} segments; need at least 3x1")));
    }
    check_size("capsule", around.saturating_mul(4 * rings))?;

    // Ring profile from the north pole down: (rho, z).
    let half = 0.5 * height;
    let mut profile = Vec::with_capacity(2 * rings);
    for q in 1..=rings {
        let a = 0.5 * PI * q as f64 / rings as f64;
        profile.push((radius * a.sin(), half + radius * a.cos()));
    }
    for q in (1..=rings).rev() {
        let a = 0.5 * PI * q as f64 / rings as f64;
        profile.push((radius * a.sin(), -half - radius * a.cos()));
    }

    let mut verts = vec![Point::new(0.0, 0.0, half + radius)];
    for &(rho, z) in &profile {
        for a in 0..around {
            let theta = TAU * a as f64 / around as f64;
            verts.push(Point::new(rho * theta.cos(), rho * theta.sin(), z));
        }
    }
    verts.push(Point::new(0.0, 0.0, -half - radius));
    let south = (verts.len() - 1) as u32;
    let ring = |r: usize, a: usize| (1 + r * around + a % around) as u32;

    let mut faces = Vec::new();
    for a in 0..around {
        faces.push([0, ring(0, a), ring(0, a + 1)]);
    }
    for r in 0..profile.len() - 1 {
        for a in 0..around {
            let (u0, u1, l0, l1) = (ring(r, a), ring(r, a + 1), ring(r + 1, a), ring(r + 1, a + 1));
            faces.push([u0, l0, l1]);
            faces.push([u0, l1, u1]);
        }
    }
    let last = profile.len() - 1;
    for a in 0..around {
        faces.push([south, ring(last, a + 1), ring(last, a)]);
    }
    let max_deviation = radius * (1.0 - (PI / around as f64).cos())
        + radius * (1.0 - (0.25 * PI / rings as f64).cos());
    Ok(TessellatedShape {
        mesh: TriangleMesh::new(verts, faces)?,
        max_deviation,
    })
}

/// Plane `normal · x = offset` clipped by half-spaces `a · x <= b`.
struct PlanarPiece {
    normal: Vector,
    offset: f64,
    constraints: Vec<(Vector, f64)>,
}

const CLIP_TOL: f64 = 1e-12;

impl PlanarPiece {
    fn polygon(&self, scale: f64) -> Vec<Point> {
        let n = self.normal.normalize();
        let origin = Point::from(n * (self.offset / self.normal.norm()));
        let helper = if n.x.abs() < 0.9 { Vector::x() } else { Vector::y() };
        let u = n.cross(&helper).normalize();
        let v = n.cross(&u);
        let mut poly = vec![
            origin + (u + v) * scale,
            origin + (-u + v) * scale,
            origin + (-u - v) * scale,
            origin + (u - v) * scale,
        ];
        for (a, b) in &self.constraints {
            let mut clipped = Vec::with_capacity(poly.len() + 1);
            for i in 0..poly.len() {
                let p = poly[i];
                let q = poly[(i + 1) % poly.len()];
                let fp = a.dot(&p.coords) - b;
                let fq = a.dot(&q.coords) - b;
                if fp <= CLIP_TOL {
                    clipped.push(p);
                }
                if (fp < -CLIP_TOL && fq > CLIP_TOL) || (fp > CLIP_TOL && fq < -CLIP_TOL) {
                    clipped.push(p + (q - p) * (fp / (fp - fq)));
                }
            }
            poly = clipped;
            if poly.is_empty() {
                break;
            }
        }
        poly
    }

    fn distance(&self, p: &Point, scale: f64) -> f64 {
        let poly = self.polygon(scale);
        if poly.is_empty() {
            return f64::INFINITY;
        }
        let n = self.normal.normalize();
        let off = self.offset / self.normal.norm();
        let plane_d = n.dot(&p.coords) - off;
        let projected = p - n * plane_d;
        if poly.len() >= 3
            && self
                .constraints
                .iter()
                .all(|(a, b)| a.dot(&projected.coords) <= b + CLIP_TOL)
        {
            return plane_d.abs();
        }
        (0..poly.len())
            .map(|i| distance_to_segment(p, &poly[i], &poly[(i + 1) % poly.len()]))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Distance to the medial surface of an origin-centered box.
///
/// By symmetry only the non-negative octant matters. There the medial set is
/// the union of the planes where two face distances tie and are minimal, plus
/// the coordinate planes where the two opposite faces are the nearest ones.
fn box_medial_distance(size: [f64; 3], p: &Point) -> f64 {
    let h = size.map(|s| 0.5 * s);
    let q = Point::new(p.x.abs(), p.y.abs(), p.z.abs());
    let axis = |i: usize| Vector::ith(i, 1.0);
    let octant: Vec<(Vector, f64)> = h
        .iter()
        .enumerate()
        .flat_map(|(i, &hi)| [(-axis(i), 0.0), (axis(i), hi)])
        .collect();
    let scale = 4.0 * h.iter().copied().fold(0.0, f64::max);

    let mut best = f64::INFINITY;
    for (i, j, m) in [(0, 1, 2), (0, 2, 1), (1, 2, 0)] {
        // h_i - x_i = h_j - x_j  and  h_i - x_i <= h_m - x_m
        let mut constraints = octant.clone();
        constraints.push((axis(m) - axis(i), h[m] - h[i]));
        let piece = PlanarPiece {
            normal: axis(i) - axis(j),
            offset: h[i] - h[j],
            constraints,
        };
        best = best.min(piece.distance(&q, scale));
    }
    for i in 0..3 {
        // x_i = 0 with the two i-faces nearest: h_i <= h_j - x_j for j != i.
        let mut constraints = octant.clone();
        for j in (0..3).filter(|&j| j != i) {
            constraints.push((axis(j), h[j] - h[i]));
        }
        let piece = PlanarPiece {
            normal: axis(i),
            offset: 0.0,
            constraints,
        };
        best = best.min(piece.distance(&q, scale));
    }
    best
}

/// Vertex classification on the finned cylinder.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinRegion {
    Barrel,
    Fin,
    Other,
}

/// Cylinder along z with a thin rectangular fin along +x, built as one
/// extruded star-shaped profile so the mesh is watertight without booleans.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FinnedCylinder {
    pub radius: f64,
    pub height: f64,
    /// Fin extent beyond the cylinder wall.
    pub fin_length: f64,
    pub fin_width: f64,
    /// Arc segments around the barrel.
    pub segments: usize,
    /// Subdivisions along each fin side.
    pub fin_segments: usize,
    /// Layers along z.
    pub layers: usize,
}

impl Default for FinnedCylinder {
    fn default() -> Self {
        FinnedCylinder {
            radius: 0.5,
            height: 1.0,
            fin_length: 0.6,
            fin_width: 0.06,
            segments: 96,
            fin_segments: 16,
            layers: 12,
        }
    }
}

impl FinnedCylinder {
    pub fn generate(&self) -> Result<(TriangleMesh, Vec<FinRegion>)> {
        positive("finned cylinder", "radius", self.radius)?;
        positive("finned cylinder", "height", self.height)?;
        positive("finned cylinder", "fin length", self.fin_length)?;
        positive("finned cylinder", "fin width", self.fin_width)?;
        if self.fin_width >= self.radius {
            return Err(unsupported("finned cylinder", "fin must be narrower than the radius"));
        }
        if self.segments < 8 || self.fin_segments < 1 || self.layers < 1 {
            return Err(unsupported("finned cylinder", "need segments >= 8, fin_segments >= 1, layers >= 1"));
        }
        check_size(
            "finned cylinder",
            (self.segments + 2 * self.fin_segments + 1).saturating_mul(2 * self.layers + 2),
        )?;

        let half_w = 0.5 * self.fin_width;
        let theta0 = (half_w / self.radius).asin();
        let attach_x = self.radius * theta0.cos();
        let tip_x = self.radius + self.fin_length;

        // Counter-clockwise profile with strictly increasing polar angle.
        let mut profile: Vec<(f64, f64, FinRegion)> = Vec::new();
        for a in 0..=self.segments {
            let t = theta0 + (TAU - 2.0 * theta0) * a as f64 / self.segments as f64;
            profile.push((self.radius * t.cos(), self.radius * t.sin(), FinRegion::Barrel));
        }
        let fin_x = |s: usize| attach_x + (tip_x - attach_x) * s as f64 / self.fin_segments as f64;
        for s in 1..=self.fin_segments {
            profile.push((fin_x(s), -half_w, FinRegion::Fin));
        }
        for s in (1..=self.fin_segments).rev() {
            profile.push((fin_x(s), half_w, FinRegion::Fin));
        }
        let ring = profile.len();

        let mut verts = Vec::with_capacity(ring * (self.layers + 1) + 2);
        let mut regions = Vec::with_capacity(verts.capacity());
        for l in 0..=self.layers {
            let z = self.height * l as f64 / self.layers as f64;
            for &(x, y, region) in &profile {
                verts.push(Point::new(x, y, z));
                regions.push(region);
            }
        }
        let bottom = verts.len() as u32;
        verts.push(Point::new(0.0, 0.0, 0.0));
        verts.push(Point::new(0.0, 0.0, self.height));
        regions.extend([FinRegion::Other, FinRegion::Other]);
        let top = bottom + 1;

        let id = |l: usize, i: usize| (l * ring + i % ring) as u32;
        let mut faces = Vec::new();
        for l in 0..self.layers {
            for i in 0..ring {
                let (l0, l1, u0, u1) = (id(l, i), id(l, i + 1), id(l + 1, i), id(l + 1, i + 1));
                faces.push([l0, l1, u1]);
                faces.push([l0, u1, u0]);
            }
        }
        for i in 0..ring {
            faces.push([bottom, id(0, i + 1), id(0, i)]);
            faces.push([top, id(self.layers, i), id(self.layers, i + 1)]);
        }
        Ok((TriangleMesh::new(verts, faces)?, regions))
    }
}

/// Any shape the command line can build by name.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ShapeSpec {
    Analytic(AnalyticShape),
    Finned(FinnedCylinder),
}

impl ShapeSpec {
    pub fn mesh(&self) -> Result<TriangleMesh> {
        match self {
            ShapeSpec::Analytic(s) => Ok(s.generate_mesh()?.mesh),
            ShapeSpec::Finned(f) => Ok(f.generate()?.0),
        }
    }
}

fn spec_err(msg: impl Into<String>) -> Error {
    Error::Parse(format!("shape spec: {}", msg.into()))
}

fn parse_number(key: &str, value: &str) -> Result<f64> {
    let v: f64 = value
        .parse()
        .map_err(|_| spec_err(format!("{key}={value} is not a number")))?;
    if !v.is_finite() {
        return Err(spec_err(format!("{key} must be finite")));
    }
    Ok(v)
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| spec_err(format!("{key}={value} is not a count")))
}

fn parse_dims<const N: usize>(key: &str, value: &str) -> Result<[usize; N]> {
    let parts: Vec<&str> = value.split('x').collect();
    if parts.len() != N {
        return Err(spec_err(format!("{key} needs {N} 'x'-separated counts")));
    }
    let mut out = [0; N];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = parse_count(key, p)?;
    }
    Ok(out)
}

impl FromStr for ShapeSpec {
    type Err = Error;

    /// Parses `kind:key=value,...`, e.g. `torus:R=1,r=0.3,res=200x50`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut pairs = Vec::new();
        for item in rest.split(',').map(str::trim).filter(|i| !i.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| spec_err(format!("expected key=value, got {item:?}")))?;
            pairs.push((k.trim(), v.trim()));
        }
        let unknown = |k: &str| spec_err(format!("unknown key {k:?} for {kind}"));

        let spec = match kind.trim() {
            "sphere" => {
                let (mut radius, mut subdivisions) = (1.0, 4);
                for (k, v) in pairs {
                    match k {
                        "r" => radius = parse_number(k, v)?,
                        "subdiv" => {
                            subdivisions = v.parse().map_err(|_| spec_err(format!("subdiv={v}")))?
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                ShapeSpec::Analytic(AnalyticShape::Sphere { radius, subdivisions })
            }
            "box" => {
                let mut size = [1.0; 3];
                for (k, v) in pairs {
                    match k {
                        "a" => size[0] = parse_number(k, v)?,
                        "b" => size[1] = parse_number(k, v)?,
                        "c" => size[2] = parse_number(k, v)?,
                        _ => return Err(unknown(k)),
                    }
                }
                ShapeSpec::Analytic(AnalyticShape::Box { size })
            }
            "torus" => {
                let (mut major, mut minor, mut segments) = (1.0, 0.3, (200, 50));
                for (k, v) in pairs {
                    match k {
                        "R" => major = parse_number(k, v)?,
                        "r" => minor = parse_number(k, v)?,
                        "res" => {
                            let [a, b] = parse_dims(k, v)?;
                            segments = (a, b);
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                ShapeSpec::Analytic(AnalyticShape::Torus { major, minor, segments })
            }
            "capsule" => {
                let (mut radius, mut height, mut segments) = (0.3, 1.0, (64, 16));
                for (k, v) in pairs {
                    match k {
                        "r" => radius = parse_number(k, v)?,
                        "h" => height = parse_number(k, v)?,
                        "res" => {
                            let [a, b] = parse_dims(k, v)?;
                            segments = (a, b);
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                ShapeSpec::Analytic(AnalyticShape::Capsule { radius, height, segments })
            }
            "fin" | "finned_cylinder" => {
                let mut f = FinnedCylinder::default();
                for (k, v) in pairs {
                    match k {
                        "r" => f.radius = parse_number(k, v)?,
                        "h" => f.height = parse_number(k, v)?,
                        "len" => f.fin_length = parse_number(k, v)?,
                        "w" => f.fin_width = parse_number(k, v)?,
                        "res" => {
                            let [a, b, c] = parse_dims(k, v)?;
                            (f.segments, f.fin_segments, f.layers) = (a, b, c);
                        }
                        _ => return Err(unknown(k)),
                    }
                }
                ShapeSpec::Finned(f)
            }
            other => return Err(spec_err(format!("unknown shape {other:?}"))),
        };
        Ok(spec)
    }
}

impl fmt::Display for ShapeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeSpec::Analytic(AnalyticShape::Sphere { radius, subdivisions }) => {
                write!(f, "sphere:r={radius},subdiv={subdivisions}")
            }
            ShapeSpec::Analytic(AnalyticShape::Box { size }) => {
                write!(f, "box:a={},b={},c={}", size[0], size[1], size[2])
            }
            ShapeSpec::Analytic(AnalyticShape::Torus { major, minor, segments }) => {
                write!(f, "torus:R={major},r={minor},res={}x{}", segments.0, segments.1)
            }
            ShapeSpec::Analytic(AnalyticShape::Capsule { radius, height, segments }) => {
                write!(f, "capsule:r={radius},h={height},res={}x{}", segments.0, segments.1)
            }
            ShapeSpec::Finned(c) => write!(
                f,
                "fin:r={},h={},len={},w={},res={}x{}x{}",
                c.radius, c.height, c.fin_length, c.fin_width, c.segments, c.fin_segments, c.layers
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::is_watertight;

    #[test]
    fn icosphere_counts() {
        for s in 0..5 {
            let shape = AnalyticShape::Sphere { radius: 1.0, subdivisions: s };
            let t = shape.generate_mesh().unwrap();
            assert_eq!(t.mesh.triangle_count(), 20 * 4usize.pow(s));
            assert!(is_watertight(&t.mesh).closed, "subdiv {s}");
            assert!(t.mesh.signed_volume() > 0.0);
            // Inradius deficit never exceeds the chord-angle bound.
            let bound = 1.0 - (PI / (2.0 * 2f64.powi(s as i32))).cos();
            assert!(t.max_deviation <= bound, "{} > {bound}", t.max_deviation);
        }
    }

    #[test]
    fn box_torus_capsule_are_watertight() {
        let b = AnalyticShape::Box { size: [2.0, 1.0, 1.0] }.generate_mesh().unwrap();
        assert_eq!(b.mesh.triangle_count(), 12);
        assert!(is_watertight(&b.mesh).closed);
        assert!((b.mesh.signed_volume() - 2.0).abs() < 1e-12);

        let t = AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (200, 50) }
            .generate_mesh()
            .unwrap();
        assert_eq!(t.mesh.triangle_count(), 20_000);
        assert!(is_watertight(&t.mesh).closed);
        let exact = 2.0 * PI * PI * 0.09;
        assert!((t.mesh.signed_volume() - exact).abs() / exact < 5e-3);

        let c = AnalyticShape::Capsule { radius: 0.3, height: 1.0, segments: (48, 12) }
            .generate_mesh()
            .unwrap();
        assert!(is_watertight(&c.mesh).closed);
        let exact = PI * 0.09 * 1.0 + 4.0 / 3.0 * PI * 0.027;
        assert!((c.mesh.signed_volume() - exact).abs() / exact < 1e-2);
    }

    #[test]
    fn finned_cylinder_is_watertight() {
        let (mesh, regions) = FinnedCylinder::default().generate().unwrap();
        assert!(is_watertight(&mesh).closed);
        assert_eq!(regions.len(), mesh.vertices().len());
        assert!(mesh.signed_volume() > 0.0);
        assert!(regions.contains(&FinRegion::Fin) && regions.contains(&FinRegion::Barrel));
    }

    #[test]
    fn unsupported_resolutions() {
        assert!(matches!(
            AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (2, 50) }.generate_mesh(),
            Err(Error::UnsupportedResolution { .. })
        ));
        assert!(AnalyticShape::Sphere { radius: 1.0, subdivisions: 12 }.generate_mesh().is_err());
        assert!(AnalyticShape::Capsule { radius: 0.3, height: 1.0, segments: (8, 0) }
            .generate_mesh()
            .is_err());
    }

    #[test]
    fn skeleton_distances() {
        let s = AnalyticShape::Sphere { radius: 1.0, subdivisions: 1 };
        assert_eq!(s.skeleton_distance(&Point::new(0.05, 0.0, 0.0)), 0.05);
        let t = AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (8, 8) };
        assert!(t.skeleton_distance(&Point::new(0.0, 1.0, 0.0)).abs() < 1e-15);
        assert!((t.skeleton_distance(&Point::new(1.1, 0.0, 0.0)) - 0.1).abs() < 1e-15);
        let c = AnalyticShape::Capsule { radius: 0.3, height: 1.0, segments: (8, 2) };
        assert!((c.skeleton_distance(&Point::new(0.1, 0.0, 0.9)) - (0.01f64 + 0.16).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn box_medial_surface_closed_form() {
        let b = AnalyticShape::Box { size: [2.0, 1.0, 1.0] };
        // On the central segment and on the diagonal planes.
        for p in [
            Point::new(0.3, 0.0, 0.0),
            Point::new(-0.2, 0.1, 0.1),
            Point::new(0.4, -0.2, 0.2),
            Point::new(0.8, 0.3, 0.1), // roof: x - y = 0.5, z <= y
            Point::new(-0.75, 0.1, -0.25),
        ] {
            assert!(b.skeleton_distance(&p) < 1e-12, "{p}");
        }
        // Off the medial set.
        let p = Point::new(0.0, 0.2, 0.0);
        assert!((b.skeleton_distance(&p) - 0.2 / 2f64.sqrt()).abs() < 1e-12);

        // Cube: medial set contains the center and face-diagonal planes.
        let cube = AnalyticShape::Box { size: [1.0, 1.0, 1.0] };
        assert!(cube.skeleton_distance(&Point::origin()) < 1e-12);
        assert!(cube.skeleton_distance(&Point::new(0.2, 0.2, 0.0)) < 1e-12);
    }

    #[test]
    fn box_medial_distance_matches_sampled_medial_set() {
        // Independent check: a point is medial iff at least two faces tie
        // for nearest. Sample that set densely and compare distances.
        let size = [2.0, 1.0, 1.0];
        let h = [1.0, 0.5, 0.5];
        let n = 60;
        let mut medial = Vec::new();
        for i in 0..=2 * n {
            for j in 0..=n {
                for k in 0..=n {
                    let p = Point::new(
                        -h[0] + 2.0 * h[0] * i as f64 / (2 * n) as f64,
                        -h[1] + 2.0 * h[1] * j as f64 / n as f64,
                        -h[2] + 2.0 * h[2] * k as f64 / n as f64,
                    );
                    let mut d: Vec<f64> = (0..3)
                        .flat_map(|a| [h[a] - p[a], h[a] + p[a]])
                        .collect();
                    d.sort_by(f64::total_cmp);
                    if d[1] - d[0] < 1e-12 {
                        medial.push(p);
                    }
                }
            }
        }
        let shape = AnalyticShape::Box { size };
        let probes = [
            Point::new(0.1, 0.3, -0.05),
            Point::new(0.9, 0.0, 0.0),
            Point::new(-0.6, 0.35, 0.3),
            Point::new(0.5, -0.1, 0.4),
        ];
        let spacing = 1.0 / n as f64;
        for p in probes {
            let sampled = medial.iter().map(|m| (p - m).norm()).fold(f64::INFINITY, f64::min);
            let exact = shape.skeleton_distance(&p);
            assert!(exact <= sampled + 1e-12, "{p}: {exact} > {sampled}");
            assert!(sampled - exact < spacing, "{p}: {exact} vs {sampled}");
        }
    }

    #[test]
    fn parse_and_display_round_trip() {
        for text in [
            "sphere:r=1,subdiv=4",
            "box:a=2,b=1,c=1",
            "torus:R=1,r=0.3,res=200x50",
            "capsule:r=0.3,h=1,res=64x16",
            "fin:r=0.5,h=1,len=0.6,w=0.06,res=96x16x12",
        ] {
            let spec: ShapeSpec = text.parse().unwrap();
            assert_eq!(spec.to_string(), text);
        }
        assert_eq!(
            "torus".parse::<ShapeSpec>().unwrap(),
            ShapeSpec::Analytic(AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (200, 50) })
        );
        for bad in ["cone", "sphere:r", "sphere:q=1", "torus:res=3", "box:a=x", "torus:res=1x2x3"] {
            assert!(bad.parse::<ShapeSpec>().is_err(), "{bad}");
        }
    }
}
