use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use morphoskel::{Error, Result};
use morphoskel_cli::commands::{self, exit_code};
use morphoskel_cli::config::{parse_emit_list, PartialConfig, PipelineConfig};

#[derive(Parser)]
#[command(name = "morphoskel", version, about = "Morphological skeletons of watertight meshes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a skeleton and write it with its residual histogram and metadata.
    Skeletonize {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Derive LFS sampling weights on surface points and draw a weighted subset.
    Sample {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        exec: ExecArgs,
        /// Skeleton PLY to use instead of computing one.
        #[arg(long)]
        skeleton: Option<PathBuf>,
        /// Surface point cloud PLY; defaults to the mesh vertices.
        #[arg(long)]
        points: Option<PathBuf>,
    },
    /// Chamfer and Hausdorff distance between two point sets.
    Eval {
        pred: PathBuf,
        target: PathBuf,
        /// Directory for metrics.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        exec: ExecArgs,
    },
    /// Repeat the pipeline and report per-stage timing statistics.
    Bench {
        #[command(flatten)]
        pipeline: PipelineArgs,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

#[derive(Args)]
struct PipelineArgs {
    /// Mesh file (OBJ or PLY).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Analytic shape, e.g. `torus:R=1,r=0.3,res=200x50`.
    #[arg(long)]
    shape: Option<String>,
    /// Uniform box draws.
    #[arg(long = "box")]
    box_count: Option<usize>,
    /// Lattice resolution per axis, instead of random draws.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    /// Surface sample size.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    sharpness: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON config file; flags take precedence over its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated outputs, or `all`.
    #[arg(long)]
    emit: Option<String>,
}

#[derive(Args)]
struct ExecArgs {
    /// Worker threads; defaults to the available cores.
    #[arg(long)]
    threads: Option<usize>,
}

impl PipelineArgs {
    fn resolve(self) -> Result<PipelineConfig> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|source| Error::Io {
                    path: path.clone(),
                    source,
                })?;
                PartialConfig::from_json(&text)?
            }
            None => PartialConfig::default(),
        };
        let flags = PartialConfig {
            input: self.input,
            shape: self.shape,
            box_count: self.box_count,
            grid: self.grid,
            k: self.k,
            n: self.n,
            m: self.m,
            seed: self.seed,
            sharpness: self.sharpness,
            out: self.out,
            emit: self.emit.as_deref().map(parse_emit_list).transpose()?,
        };
        file.overlay(flags).resolve()
    }
}

fn init_threads(exec: &ExecArgs) -> Result<usize> {
    if let Some(t) = exec.threads {
        if t == 0 {
            return Err(Error::InvalidConfig("threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    }
    Ok(rayon::current_num_threads())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Skeletonize { pipeline, exec } => {
            let config = pipeline.resolve()?;
            let threads = init_threads(&exec)?;
            let out = commands::cmd_skeletonize(&config, threads)?;
            let meta = &out.metadata;
            eprintln!(
                "{} inner points from {} candidates, {} exact maxima, {} spheres in {:.2} s",
                meta.counts.inner_points,
                meta.counts.candidates,
                meta.counts.exact_maxima,
                meta.counts.skeleton_spheres,
                meta.total_s
            );
            for p in &out.written {
                println!("{}", p.display());
            }
        }
        Command::Sample {
            pipeline,
            exec,
            skeleton,
            points,
        } => {
            let config = pipeline.resolve()?;
            init_threads(&exec)?;
            let out = commands::cmd_sample(&config, skeleton.as_deref(), points.as_deref())?;
            eprintln!("sampled {} of {} surface points", out.sampled.len(), out.surface_points);
            for p in &out.written {
                println!("{}", p.display());
            }
        }
        Command::Eval {
            pred,
            target,
            out,
            exec,
        } => {
            init_threads(&exec)?;
            let m = commands::cmd_eval(&pred, &target, out.as_deref())?;
            println!(
                "{}",
                serde_json::to_string(&m).map_err(|e| Error::Parse(e.to_string()))?
            );
        }
        Command::Bench { pipeline, exec, reps } => {
            let config = pipeline.resolve()?;
            let threads = init_threads(&exec)?;
            let (_, path) = commands::cmd_bench(&config, reps, threads)?;
            print!("{}", fs::read_to_string(&path).unwrap_or_default());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
