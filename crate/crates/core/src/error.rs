use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the skeletonization pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("mesh has no triangles")]
    EmptyMesh,

    #[error("mesh is not watertight: {boundary_edges} boundary edges, {non_manifold_edges} non-manifold edges, {inconsistent_edges} inconsistently wound edges")]
    NotWatertight {
        boundary_edges: usize,
        non_manifold_edges: usize,
        inconsistent_edges: usize,
    },

    #[error("triangle {triangle} references vertex {index}, but mesh has {vertex_count} vertices")]
    InvalidIndex {
        triangle: usize,
        index: usize,
        vertex_count: usize,
    },

    #[error("need more than {k} points for a {k}-NN graph, got {count}")]
    TooFewPoints { count: usize, k: usize },

    #[error("all ray casts from ({x}, {y}, {z}) were degenerate")]
    DegenerateOccupancy { x: f64, y: f64, z: f64 },

    #[error("no sample points fell inside the mesh")]
    NoInnerPoints,

    #[error("samples carry no distance values")]
    MissingDistances,

    #[error("field lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("requested {requested} items from a set of {available}")]
    SubsetTooLarge { requested: usize, available: usize },

    #[error("skeleton is empty")]
    EmptySkeleton,

    #[error("point set is empty")]
    EmptySet,

    #[error("unsupported resolution for {shape}: {detail}")]
    UnsupportedResolution { shape: &'static str, detail: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
