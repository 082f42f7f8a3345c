//! Morphological skeletons of closed triangle meshes.
//!
//! The pipeline samples candidate points inside a watertight mesh with a
//! parity ray-casting occupancy test, evaluates their unsigned distance to the
//! surface, dilates that field over a reflexive k-nearest-neighbor graph and
//! keeps the points whose dilation residual is smallest. Those points are the
//! centers of (approximately) maximal inscribed balls. From a skeleton the
//! crate also derives per-point sampling priors for surface point clouds based
//! on local feature size.
//!
//! ```no_run
//! use morphoskel::pipeline::{skeletonize, PipelineParams, Sampling};
//! use morphoskel::shapes::AnalyticShape;
//!
//! let shape = AnalyticShape::Torus { major: 1.0, minor: 0.3, segments: (200, 50) };
//! let mesh = shape.generate_mesh().unwrap().mesh;
//! let params = PipelineParams {
//!     sampling: Sampling::Random { box_count: 1_000_000 },
//!     k: 20,
//!     n: 256,
//!     seed: 0,
//! };
//! let run = skeletonize(&mesh, &params).unwrap();
//! println!("{} spheres", run.skeleton.spheres.len());
//! ```

pub mod distance;
pub mod error;
pub mod lfs;
pub mod mesh;
pub mod metrics;
pub mod morphology;
pub mod occupancy;
pub mod pipeline;
pub mod shapes;
pub mod spatial;

pub use error::{Error, Result};
pub use mesh::{Aabb, TriangleMesh, WatertightReport};

/// 3D point in double precision.
pub type Point = nalgebra::Point3<f64>;
/// 3D vector in double precision.
pub type Vector = nalgebra::Vector3<f64>;
