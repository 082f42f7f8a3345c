//! End-to-end skeletonization: sample the interior, evaluate the distance
//! field, dilate over the k-NN graph and keep the lowest residuals.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::distance::udf_batch;
use crate::error::{Error, Result};
use crate::mesh::{bounding_box, TriangleMesh};
use crate::morphology::{
    count_exact_maxima, dilate, dilation_residual, select_skeleton, ScalarField, Skeleton, DEFAULT_K,
    DEFAULT_SKELETON_SIZE,
};
use crate::occupancy::{draw_box_points, filter_inside, Lattice, SampleSource, VolumeSamples};
use crate::spatial::{build_knn_graph, TriangleBvh};

/// Box draws used when nothing else is configured.
pub const DEFAULT_BOX_COUNT: usize = 10_000_000;

/// Where candidate interior points come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Uniform draws in the mesh bounding box.
    Random { box_count: usize },
    /// Cell-centered lattice over the mesh bounding box.
    Grid { resolution: usize },
    /// Caller-placed lattice, e.g. one that moves with the mesh.
    Lattice(Lattice),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineParams {
    pub sampling: Sampling,
    pub k: usize,
    pub n: usize,
    /// Seeds the box draws and the occupancy retry directions.
    pub seed: u64,
}

impl Default for PipelineParams {
    fn default() -> Self {
        PipelineParams {
            sampling: Sampling::Random {
                box_count: DEFAULT_BOX_COUNT,
            },
            k: DEFAULT_K,
            n: DEFAULT_SKELETON_SIZE,
            seed: 0,
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if self.n == 0 {
            return Err(Error::InvalidConfig("n must be at least 1".into()));
        }
        let candidates = match &self.sampling {
            Sampling::Random { box_count } => *box_count,
            Sampling::Grid { resolution } => resolution.saturating_pow(3),
            Sampling::Lattice(l) => l.resolution.saturating_pow(3),
        };
        if candidates < self.n {
            return Err(Error::InvalidConfig(format!(
                "n = {} exceeds the {candidates} candidate points",
                self.n
            )));
        }
        Ok(())
    }
}

/// Wall-clock time per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub sampling: Duration,
    pub occupancy: Duration,
    pub udf: Duration,
    pub knn: Duration,
    pub dilation: Duration,
    pub selection: Duration,
}

impl StageTimings {
    pub const STAGES: [&'static str; 6] = ["sampling", "occupancy", "udf", "knn", "dilation", "selection"];

    pub fn as_array(&self) -> [Duration; 6] {
        [
            self.sampling,
            self.occupancy,
            self.udf,
            self.knn,
            self.dilation,
            self.selection,
        ]
    }

    pub fn total(&self) -> Duration {
        self.as_array().iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct SkeletonRun {
    pub skeleton: Skeleton,
    /// Inner samples with their distance values.
    pub samples: VolumeSamples,
    /// Dilation residual per inner sample.
    pub residuals: ScalarField,
    pub exact_maxima: usize,
    pub timings: StageTimings,
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot = start.elapsed();
    out
}

/// Runs the whole pipeline on a watertight mesh.
pub fn skeletonize(mesh: &TriangleMesh, params: &PipelineParams) -> Result<SkeletonRun> {
    params.validate()?;
    mesh.ensure_watertight()?;
    let mut timings = StageTimings::default();
    let bvh = TriangleBvh::build(mesh)?;

    let (candidates, source) = timed(&mut timings.sampling, || -> Result<_> {
        Ok(match &params.sampling {
            Sampling::Random { box_count } => (
                draw_box_points(&bounding_box(mesh, 0.0)?, *box_count, params.seed),
                SampleSource::UniformRandom {
                    seed: params.seed,
                    box_count: *box_count,
                },
            ),
            Sampling::Grid { resolution } => {
                let lattice = Lattice::new(bounding_box(mesh, 0.0)?, *resolution);
                (lattice.points(), SampleSource::Meshgrid { resolution: *resolution })
            }
            Sampling::Lattice(lattice) => (
                lattice.points(),
                SampleSource::Meshgrid {
                    resolution: lattice.resolution,
                },
            ),
        })
    })?;
    if let SampleSource::Meshgrid { resolution } = source {
        if resolution < 2 {
            return Err(Error::InvalidConfig("grid resolution must be at least 2".into()));
        }
    }

    let points = timed(&mut timings.occupancy, || filter_inside(&bvh, &candidates, params.seed))?;
    if points.is_empty() {
        return Err(Error::NoInnerPoints);
    }
    let mut samples = VolumeSamples {
        points,
        source,
        candidate_count: candidates.len(),
        udf: None,
    };
    drop(candidates);

    let udf = timed(&mut timings.udf, || udf_batch(&bvh, &samples.points));
    let graph = timed(&mut timings.knn, || build_knn_graph(&samples.points, params.k))?;
    let residuals = timed(&mut timings.dilation, || -> Result<_> {
        let dilated = dilate(&udf, &graph)?;
        dilation_residual(&udf, &dilated)
    })?;
    drop(graph);
    samples.set_udf(udf)?;
    let skeleton = timed(&mut timings.selection, || {
        select_skeleton(&samples, &residuals, params.n, params.k)
    })?;

    Ok(SkeletonRun {
        exact_maxima: count_exact_maxima(&residuals),
        skeleton,
        samples,
        residuals,
        timings,
    })
}
