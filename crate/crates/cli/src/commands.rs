//! The four subcommands, as library functions returning their summaries.

use std::fs;
use std::path::{Path, PathBuf};

use morphoskel::lfs::{local_feature_size, prior_weights, weighted_sample};
use morphoskel::mesh::{load_mesh_auto, load_point_cloud, save_point_cloud};
use morphoskel::metrics::{chamfer, hausdorff};
use morphoskel::morphology::{SkeletalSphere, Skeleton, SkeletonParams};
use morphoskel::occupancy::SampleSource;
use morphoskel::pipeline::{skeletonize, SkeletonRun, StageTimings};
use morphoskel::shapes::ShapeSpec;
use morphoskel::{Error, Point, Result, TriangleMesh};
use serde::Serialize;

use crate::artifacts::{self, residual_histogram};
use crate::config::{Emit, Input, PipelineConfig};

pub fn load_input(input: Option<&Input>) -> Result<TriangleMesh> {
    match input {
        Some(Input::Path(p)) => load_mesh_auto(p),
        Some(Input::Shape(s)) => s.parse::<ShapeSpec>()?.mesh(),
        None => Err(Error::InvalidConfig("no input mesh or shape given".into())),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct Counts {
    pub mesh_vertices: usize,
    pub mesh_triangles: usize,
    pub dropped_degenerate_triangles: usize,
    pub candidates: usize,
    pub inner_points: usize,
    pub exact_maxima: usize,
    pub skeleton_spheres: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkeletonSummary {
    pub mean_residual: f64,
    pub mean_radius: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunMetadata {
    pub version: &'static str,
    pub config: PipelineConfig,
    pub threads: usize,
    pub counts: Counts,
    pub skeleton: SkeletonSummary,
    pub timings_s: StageSeconds,
    pub total_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StageSeconds {
    pub sampling: f64,
    pub occupancy: f64,
    pub udf: f64,
    pub knn: f64,
    pub dilation: f64,
    pub selection: f64,
}

impl From<&StageTimings> for StageSeconds {
    fn from(t: &StageTimings) -> Self {
        StageSeconds {
            sampling: t.sampling.as_secs_f64(),
            occupancy: t.occupancy.as_secs_f64(),
            udf: t.udf.as_secs_f64(),
            knn: t.knn.as_secs_f64(),
            dilation: t.dilation.as_secs_f64(),
            selection: t.selection.as_secs_f64(),
        }
    }
}

pub struct SkeletonizeOutcome {
    pub run: SkeletonRun,
    pub metadata: RunMetadata,
    pub written: Vec<PathBuf>,
}

fn metadata(config: &PipelineConfig, mesh: &TriangleMesh, run: &SkeletonRun, threads: usize) -> RunMetadata {
    let sk = &run.skeleton;
    RunMetadata {
        version: env!("CARGO_PKG_VERSION"),
        config: config.clone(),
        threads,
        counts: Counts {
            mesh_vertices: mesh.vertices().len(),
            mesh_triangles: mesh.triangle_count(),
            dropped_degenerate_triangles: mesh.dropped_degenerate(),
            candidates: run.samples.candidate_count,
            inner_points: run.samples.len(),
            exact_maxima: run.exact_maxima,
            skeleton_spheres: sk.len(),
        },
        skeleton: SkeletonSummary {
            mean_residual: sk.mean_residual(),
            mean_radius: sk.mean_radius(),
            max_residual: sk.residuals().into_iter().fold(0.0, f64::max),
        },
        timings_s: (&run.timings).into(),
        total_s: run.timings.total().as_secs_f64(),
    }
}

fn write_lfs_heatmap(path: &Path, points: &[Point], skeleton: &Skeleton, sharpness: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    let lfs = local_feature_size(points, skeleton)?;
    let prior = prior_weights(&lfs, sharpness)?;
    save_point_cloud(path, points, &[("lfs", &prior.lfs), ("weight", &prior.weight)])?;
    Ok((prior.lfs, prior.weight))
}

pub fn cmd_skeletonize(config: &PipelineConfig, threads: usize) -> Result<SkeletonizeOutcome> {
    let mesh = load_input(config.input.as_ref())?;
    let run = skeletonize(&mesh, &config.params())?;
    ensure_dir(&config.out)?;
    let meta = metadata(config, &mesh, &run, threads);
    let mut written = Vec::new();
    for emit in &config.emit {
        let path = match emit {
            Emit::SkeletonPly => {
                let p = config.out.join(artifacts::SKELETON_PLY);
                artifacts::write_skeleton_ply(&p, &run.skeleton)?;
                p
            }
            Emit::ResidualHistogramCsv => {
                let p = config.out.join(artifacts::HISTOGRAM_CSV);
                artifacts::write_histogram_csv(&p, &residual_histogram(&run.skeleton.residuals()))?;
                p
            }
            Emit::LfsHeatmapPly => {
                let p = config.out.join(artifacts::LFS_HEATMAP_PLY);
                write_lfs_heatmap(&p, mesh.vertices(), &run.skeleton, config.sharpness)?;
                p
            }
            Emit::MetricsJson => {
                let p = config.out.join(artifacts::METADATA_JSON);
                artifacts::write_json(&p, &meta)?;
                p
            }
            Emit::TimingsCsv => {
                let p = config.out.join(artifacts::TIMINGS_CSV);
                artifacts::write_timings_csv(&p, &run.timings)?;
                p
            }
        };
        written.push(path);
    }
    Ok(SkeletonizeOutcome {
        run,
        metadata: meta,
        written,
    })
}

/// Reads a skeleton PLY written by `skeletonize`.
pub fn load_skeleton(path: &Path) -> Result<Skeleton> {
    let cloud = load_point_cloud(path)?;
    let radii = cloud.scalar("radius").map(<[f64]>::to_vec);
    let residuals = cloud.scalar("residual").map(<[f64]>::to_vec);
    let n = cloud.points.len();
    let spheres = cloud
        .points
        .iter()
        .enumerate()
        .map(|(i, &center)| SkeletalSphere {
            center,
            radius: radii.as_ref().map_or(0.0, |r| r[i]),
            residual: residuals.as_ref().map_or(0.0, |r| r[i]),
            source_index: i,
        })
        .collect();
    Ok(Skeleton {
        spheres,
        params: SkeletonParams {
            k: 0,
            sampling: SampleSource::Meshgrid { resolution: 0 },
            n,
        },
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct SampleOutcome {
    pub surface_points: usize,
    pub sampled: Vec<usize>,
    pub weight_sum: f64,
    pub written: Vec<PathBuf>,
}

/// Surface points come from `points` when given, otherwise from the mesh
/// vertices. The skeleton is read from `skeleton` or computed.
pub fn cmd_sample(config: &PipelineConfig, skeleton: Option<&Path>, points: Option<&Path>) -> Result<SampleOutcome> {
    let mesh = if skeleton.is_none() || points.is_none() {
        Some(load_input(config.input.as_ref())?)
    } else {
        None
    };
    let skeleton = match skeleton {
        Some(p) => load_skeleton(p)?,
        None => skeletonize(mesh.as_ref().expect("mesh loaded"), &config.params())?.skeleton,
    };
    let surface: Vec<Point> = match points {
        Some(p) => load_point_cloud(p)?.points,
        None => mesh.as_ref().expect("mesh loaded").vertices().to_vec(),
    };
    ensure_dir(&config.out)?;
    let heatmap = config.out.join(artifacts::LFS_HEATMAP_PLY);
    let (lfs, weight) = write_lfs_heatmap(&heatmap, &surface, &skeleton, config.sharpness)?;
    let prior = morphoskel::lfs::SamplingPrior { lfs, weight };
    let sampled = weighted_sample(&prior, config.m, config.seed)?;
    let pick = |v: &[f64]| sampled.iter().map(|&i| v[i]).collect::<Vec<f64>>();
    let index: Vec<f64> = sampled.iter().map(|&i| i as f64).collect();
    let sampled_path = config.out.join(artifacts::SAMPLED_PLY);
    save_point_cloud(
        &sampled_path,
        &sampled.iter().map(|&i| surface[i]).collect::<Vec<_>>(),
        &[
            ("lfs", &pick(&prior.lfs)),
            ("weight", &pick(&prior.weight)),
            ("source_index", &index),
        ],
    )?;
    Ok(SampleOutcome {
        surface_points: surface.len(),
        weight_sum: prior.weight.iter().sum(),
        sampled,
        written: vec![heatmap, sampled_path],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvalMetrics {
    pub chamfer: f64,
    pub hausdorff: f64,
}

pub fn cmd_eval(pred: &Path, target: &Path, out: Option<&Path>) -> Result<EvalMetrics> {
    let a = load_point_cloud(pred)?.points;
    let b = load_point_cloud(target)?.points;
    let m = EvalMetrics {
        chamfer: chamfer(&a, &b)?,
        hausdorff: hausdorff(&a, &b)?,
    };
    if let Some(dir) = out {
        ensure_dir(dir)?;
        artifacts::write_json(&dir.join(artifacts::METRICS_JSON), &m)?;
    }
    Ok(m)
}

pub fn cmd_bench(config: &PipelineConfig, reps: usize, threads: usize) -> Result<(Vec<StageTimings>, PathBuf)> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    let mesh = load_input(config.input.as_ref())?;
    let params = config.params();
    let runs = (0..reps)
        .map(|_| skeletonize(&mesh, &params).map(|r| r.timings))
        .collect::<Result<Vec<_>>>()?;
    ensure_dir(&config.out)?;
    let path = config.out.join(artifacts::BENCH_CSV);
    artifacts::write_bench_csv(&path, &artifacts::machine_info(threads), &runs)?;
    Ok((runs, path))
}

/// Process exit status for an error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Parse(_) | Error::EmptyMesh | Error::InvalidIndex { .. } => 2,
        Error::NotWatertight { .. } => 3,
        Error::NoInnerPoints => 4,
        Error::InvalidConfig(_)
        | Error::SubsetTooLarge { .. }
        | Error::TooFewPoints { .. }
        | Error::UnsupportedResolution { .. } => 5,
        _ => 1,
    }
}
