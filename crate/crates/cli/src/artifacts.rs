//! Files written by the commands: PLY point sets, CSV tables, JSON metadata.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Duration;

use morphoskel::mesh::save_point_cloud;
use morphoskel::morphology::Skeleton;
use morphoskel::pipeline::StageTimings;
use morphoskel::{Error, Result};
use serde::Serialize;

pub const HISTOGRAM_BINS: usize = 64;

pub const SKELETON_PLY: &str = "skeleton.ply";
pub const HISTOGRAM_CSV: &str = "residual_histogram.csv";
pub const METADATA_JSON: &str = "run.json";
pub const TIMINGS_CSV: &str = "timings.csv";
pub const LFS_HEATMAP_PLY: &str = "lfs_heatmap.ply";
pub const SAMPLED_PLY: &str = "sampled.ply";
pub const METRICS_JSON: &str = "metrics.json";
pub const BENCH_CSV: &str = "bench_timings.csv";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

pub fn write_skeleton_ply(path: &Path, skeleton: &Skeleton) -> Result<()> {
    save_point_cloud(
        path,
        &skeleton.centers(),
        &[("radius", &skeleton.radii()), ("residual", &skeleton.residuals())],
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin {
    pub bin: usize,
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
}

/// Fixed-width bins over `[0, max]`; the last bin is closed on the right.
pub fn residual_histogram(residuals: &[f64]) -> Vec<HistogramBin> {
    let max = residuals.iter().copied().fold(0.0, f64::max);
    let width = max / HISTOGRAM_BINS as f64;
    let mut counts = [0usize; HISTOGRAM_BINS];
    for &r in residuals {
        let b = if max > 0.0 {
            ((r / max * HISTOGRAM_BINS as f64) as usize).min(HISTOGRAM_BINS - 1)
        } else {
            0
        };
        counts[b] += 1;
    }
    counts
        .iter()
        .enumerate()
        .map(|(bin, &count)| HistogramBin {
            bin,
            lower: bin as f64 * width,
            upper: if bin + 1 == HISTOGRAM_BINS { max } else { (bin + 1) as f64 * width },
            count,
        })
        .collect()
}

pub fn write_histogram_csv(path: &Path, bins: &[HistogramBin]) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for b in bins {
        w.serialize(b).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_timings_csv(path: &Path, timings: &StageTimings) -> Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    w.write_record(["stage", "seconds"]).map_err(csv_err(path))?;
    for (stage, d) in StageTimings::STAGES.iter().zip(timings.as_array()) {
        w.write_record([stage.to_string(), d.as_secs_f64().to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    writeln!(w).and_then(|_| w.flush()).map_err(io_err(path))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StageStats {
    pub min: f64,
    pub median: f64,
    pub max: f64,
}

impl StageStats {
    pub fn of(samples: &[Duration]) -> StageStats {
        let mut s: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        s.sort_by(f64::total_cmp);
        let mid = s.len() / 2;
        let median = if s.len().is_multiple_of(2) { 0.5 * (s[mid - 1] + s[mid]) } else { s[mid] };
        StageStats {
            min: s[0],
            median,
            max: s[s.len() - 1],
        }
    }
}

/// Host description written above benchmark tables.
pub fn machine_info(threads: usize) -> Vec<(String, String)> {
    let cpu = std::fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| "unknown".into());
    vec![
        ("os".into(), std::env::consts::OS.into()),
        ("arch".into(), std::env::consts::ARCH.into()),
        ("cpu".into(), cpu),
        (
            "available_cores".into(),
            std::thread::available_parallelism().map_or(1, |n| n.get()).to_string(),
        ),
        ("threads".into(), threads.to_string()),
    ]
}

/// Per-stage min/median/max. Machine details go in leading `#` lines.
pub fn write_bench_csv(path: &Path, machine: &[(String, String)], runs: &[StageTimings]) -> Result<()> {
    let mut out = create(path)?;
    for (k, v) in machine {
        writeln!(out, "# {k}: {v}").map_err(io_err(path))?;
    }
    writeln!(out, "# repetitions: {}", runs.len()).map_err(io_err(path))?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["stage", "min_s", "median_s", "max_s"]).map_err(csv_err(path))?;
    let per_run: Vec<[Duration; 6]> = runs.iter().map(StageTimings::as_array).collect();
    for (i, stage) in StageTimings::STAGES.iter().enumerate() {
        let column: Vec<Duration> = per_run.iter().map(|r| r[i]).collect();
        let s = StageStats::of(&column);
        w.write_record([
            stage.to_string(),
            s.min.to_string(),
            s.median.to_string(),
            s.max.to_string(),
        ])
        .map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
