//! Triangle meshes: loading, validation, watertightness and bounds.

mod aabb;
pub mod obj;
pub mod ply;

use std::collections::HashMap;
use std::fs;
use std::io::BufWriter;
use std::path::Path;
use std::sync::OnceLock;

use nalgebra::Isometry3;

pub use aabb::Aabb;
pub use ply::PlyEncoding;

use crate::error::{Error, Result};
use crate::{Point, Vector};

/// Triangles with area below this are dropped during validation.
pub const DEGENERATE_AREA: f64 = 1e-12;

/// Per-triangle data computed on first use.
#[derive(Debug, Clone, Copy)]
pub struct TriangleInfo {
    pub normal: Vector,
    pub area: f64,
}

/// Indexed triangle surface.
///
/// Vertex order is preserved from the input; vertices are never merged.
#[derive(Debug)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    triangles: Vec<[u32; 3]>,
    dropped_degenerate: usize,
    info: OnceLock<Vec<TriangleInfo>>,
}

impl Clone for TriangleMesh {
    fn clone(&self) -> Self {
        TriangleMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
            dropped_degenerate: self.dropped_degenerate,
            info: OnceLock::new(),
        }
    }
}

impl TriangleMesh {
    /// Validates indices and drops triangles whose area is below
    /// [`DEGENERATE_AREA`]. An empty result is allowed here; loaders reject it.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> Result<Self> {
        let n = vertices.len();
        let mut kept = Vec::with_capacity(triangles.len());
        let mut dropped = 0;
        for (t, tri) in triangles.into_iter().enumerate() {
            if let Some(&bad) = tri.iter().find(|&&v| v as usize >= n) {
                return Err(Error::InvalidIndex {
                    triangle: t,
                    index: bad as usize,
                    vertex_count: n,
                });
            }
            let [a, b, c] = tri.map(|v| vertices[v as usize]);
            if 0.5 * (b - a).cross(&(c - a)).norm() < DEGENERATE_AREA {
                dropped += 1;
            } else {
                kept.push(tri);
            }
        }
        Ok(TriangleMesh {
            vertices,
            triangles: kept,
            dropped_degenerate: dropped,
            info: OnceLock::new(),
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    /// Number of degenerate triangles removed at construction.
    pub fn dropped_degenerate(&self) -> usize {
        self.dropped_degenerate
    }

    pub fn triangle(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|v| self.vertices[v as usize])
    }

    pub fn triangle_info(&self) -> &[TriangleInfo] {
        self.info.get_or_init(|| {
            (0..self.triangles.len())
                .map(|t| {
                    let [a, b, c] = self.triangle(t);
                    let n = (b - a).cross(&(c - a));
                    let len = n.norm();
                    TriangleInfo {
                        normal: n / len,
                        area: 0.5 * len,
                    }
                })
                .collect()
        })
    }

    pub fn surface_area(&self) -> f64 {
        self.triangle_info().iter().map(|t| t.area).sum()
    }

    /// Signed enclosed volume; positive for outward-facing closed meshes.
    pub fn signed_volume(&self) -> f64 {
        (0..self.triangles.len())
            .map(|t| {
                let [a, b, c] = self.triangle(t);
                a.coords.dot(&b.coords.cross(&c.coords)) / 6.0
            })
            .sum()
    }

    /// Applies a rigid motion to every vertex.
    pub fn transformed(&self, motion: &Isometry3<f64>) -> TriangleMesh {
        TriangleMesh {
            vertices: self.vertices.iter().map(|p| motion * p).collect(),
            triangles: self.triangles.clone(),
            dropped_degenerate: self.dropped_degenerate,
            info: OnceLock::new(),
        }
    }

    /// Errors with [`Error::NotWatertight`] unless the mesh is closed.
    pub fn ensure_watertight(&self) -> Result<()> {
        let report = is_watertight(self);
        if report.closed {
            Ok(())
        } else {
            Err(Error::NotWatertight {
                boundary_edges: report.boundary_edge_count,
                non_manifold_edges: report.non_manifold_edge_count,
                inconsistent_edges: report.inconsistent_edge_count,
            })
        }
    }
}

/// Edge-incidence summary of a mesh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WatertightReport {
    pub closed: bool,
    /// Edges used by exactly one triangle.
    pub boundary_edge_count: usize,
    /// Edges used by more than two triangles.
    pub non_manifold_edge_count: usize,
    /// Two-triangle edges traversed in the same direction by both.
    pub inconsistent_edge_count: usize,
}

pub fn is_watertight(mesh: &TriangleMesh) -> WatertightReport {
    // undirected edge -> (uses as lo->hi, uses as hi->lo)
    let mut edges: HashMap<(u32, u32), (u32, u32)> = HashMap::new();
    for tri in mesh.triangles() {
        for i in 0..3 {
            let (a, b) = (tri[i], tri[(i + 1) % 3]);
            let entry = edges.entry((a.min(b), a.max(b))).or_default();
            if a < b {
                entry.0 += 1;
            } else {
                entry.1 += 1;
            }
        }
    }

    let mut report = WatertightReport {
        closed: false,
        boundary_edge_count: 0,
        non_manifold_edge_count: 0,
        inconsistent_edge_count: 0,
    };
    for &(fwd, rev) in edges.values() {
        match fwd + rev {
            1 => report.boundary_edge_count += 1,
            2 if fwd != 1 => report.inconsistent_edge_count += 1,
            2 => {}
            _ => report.non_manifold_edge_count += 1,
        }
    }
    report.closed = !mesh.is_empty()
        && report.boundary_edge_count == 0
        && report.non_manifold_edge_count == 0
        && report.inconsistent_edge_count == 0;
    report
}

/// Tight box around the referenced vertices, grown by `padding_fraction`
/// times the largest extent on every side.
pub fn bounding_box(mesh: &TriangleMesh, padding_fraction: f64) -> Result<Aabb> {
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    let tight = Aabb::from_points(mesh.triangles().iter().flatten().map(|&v| &mesh.vertices[v as usize]));
    let extent = tight.extent();
    Ok(tight.padded(padding_fraction * extent.max()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Option<Self> {
        let ext = path.extension()?.to_str()?.to_ascii_lowercase();
        match ext.as_str() {
            "obj" => Some(MeshFormat::Obj),
            "ply" => Some(MeshFormat::Ply),
            _ => None,
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn format_for(path: &Path) -> Result<MeshFormat> {
    MeshFormat::from_path(path)
        .ok_or_else(|| Error::Parse(format!("cannot infer mesh format of {}", path.display())))
}

/// Builds a mesh from parsed vertex/face data, mapping index errors to
/// parse errors since they come from a malformed file.
pub fn mesh_from_parts(vertices: Vec<Point>, triangles: Vec<[u32; 3]>) -> Result<TriangleMesh> {
    let mesh = TriangleMesh::new(vertices, triangles).map_err(|e| match e {
        Error::InvalidIndex { .. } => Error::Parse(e.to_string()),
        other => other,
    })?;
    if mesh.is_empty() {
        return Err(Error::EmptyMesh);
    }
    Ok(mesh)
}

/// Parses mesh bytes in the given format.
pub fn parse_mesh(bytes: &[u8], format: MeshFormat) -> Result<TriangleMesh> {
    let (vertices, triangles) = match format {
        MeshFormat::Obj => {
            let data = obj::parse(bytes)?;
            (data.vertices, data.triangles)
        }
        MeshFormat::Ply => {
            let data = ply::parse(bytes)?;
            let mut triangles = Vec::with_capacity(data.faces.len());
            for face in &data.faces {
                if face.len() < 3 {
                    return Err(Error::Parse(format!("face with {} vertices", face.len())));
                }
                for w in 1..face.len() - 1 {
                    triangles.push([face[0], face[w], face[w + 1]]);
                }
            }
            (data.vertices, triangles)
        }
    };
    mesh_from_parts(vertices, triangles)
}

pub fn load_mesh(path: &Path, format: MeshFormat) -> Result<TriangleMesh> {
    parse_mesh(&read_file(path)?, format)
}

/// Loads a mesh, choosing the format from the file extension.
pub fn load_mesh_auto(path: &Path) -> Result<TriangleMesh> {
    load_mesh(path, format_for(path)?)
}

/// Writes OBJ, or binary little-endian PLY.
pub fn save_mesh(path: &Path, mesh: &TriangleMesh, format: MeshFormat) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let out = BufWriter::new(file);
    match format {
        MeshFormat::Obj => obj::write(out, mesh.vertices(), mesh.triangles()),
        MeshFormat::Ply => ply::write(
            out,
            PlyEncoding::BinaryLittleEndian,
            mesh.vertices(),
            &[],
            Some(mesh.triangles()),
        ),
    }
    .map_err(|e| Error::io(path, e))
}

/// Points plus any named per-point scalars.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    pub points: Vec<Point>,
    pub scalars: Vec<(String, Vec<f64>)>,
}

impl PointCloud {
    pub fn scalar(&self, name: &str) -> Option<&[f64]> {
        self.scalars
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }
}

/// Loads the vertex set of a PLY or OBJ file; faces are ignored.
pub fn load_point_cloud(path: &Path) -> Result<PointCloud> {
    let bytes = read_file(path)?;
    let cloud = match format_for(path)? {
        MeshFormat::Ply => {
            let data = ply::parse(&bytes)?;
            PointCloud {
                points: data.vertices,
                scalars: data.scalars,
            }
        }
        MeshFormat::Obj => PointCloud {
            points: obj::parse(&bytes)?.vertices,
            scalars: Vec::new(),
        },
    };
    Ok(cloud)
}

/// Writes a point cloud as binary little-endian PLY with extra scalars.
pub fn save_point_cloud(path: &Path, points: &[Point], scalars: &[(&str, &[f64])]) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    ply::write(
        BufWriter::new(file),
        PlyEncoding::BinaryLittleEndian,
        points,
        scalars,
        None,
    )
    .map_err(|e| Error::io(path, e))
}
