//! Run configuration: JSON file values overridden by command-line flags,
//! falling back to defaults.

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use morphoskel::lfs::DEFAULT_SHARPNESS;
use morphoskel::morphology::{DEFAULT_K, DEFAULT_SKELETON_SIZE};
use morphoskel::pipeline::{PipelineParams, Sampling, DEFAULT_BOX_COUNT};
use morphoskel::shapes::ShapeSpec;
use morphoskel::{Error, Result};
use serde::{Deserialize, Serialize};

pub const DEFAULT_SAMPLE_SIZE: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    SkeletonPly,
    ResidualHistogramCsv,
    LfsHeatmapPly,
    MetricsJson,
    TimingsCsv,
}

impl Emit {
    pub const ALL: [Emit; 5] = [
        Emit::SkeletonPly,
        Emit::ResidualHistogramCsv,
        Emit::LfsHeatmapPly,
        Emit::MetricsJson,
        Emit::TimingsCsv,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Emit::SkeletonPly => "skeleton_ply",
            Emit::ResidualHistogramCsv => "residual_histogram_csv",
            Emit::LfsHeatmapPly => "lfs_heatmap_ply",
            Emit::MetricsJson => "metrics_json",
            Emit::TimingsCsv => "timings_csv",
        }
    }

    pub fn default_set() -> BTreeSet<Emit> {
        [Emit::SkeletonPly, Emit::ResidualHistogramCsv, Emit::MetricsJson]
            .into_iter()
            .collect()
    }
}

impl fmt::Display for Emit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Emit::ALL
            .into_iter()
            .find(|e| e.name() == s.trim())
            .ok_or_else(|| Error::InvalidConfig(format!("unknown emit target {s:?}")))
    }
}

/// Comma-separated emit list; `all` selects everything.
pub fn parse_emit_list(s: &str) -> Result<BTreeSet<Emit>> {
    if s.trim() == "all" {
        return Ok(Emit::ALL.into_iter().collect());
    }
    s.split(',').filter(|t| !t.trim().is_empty()).map(Emit::from_str).collect()
}

/// Mesh source: a file or a named analytic shape.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Path(PathBuf),
    Shape(String),
}

/// Every field optional; used both for the JSON file and for flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PartialConfig {
    pub input: Option<PathBuf>,
    pub shape: Option<String>,
    pub box_count: Option<usize>,
    pub grid: Option<usize>,
    pub k: Option<usize>,
    pub n: Option<usize>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
    pub sharpness: Option<f64>,
    pub out: Option<PathBuf>,
    pub emit: Option<BTreeSet<Emit>>,
}

impl PartialConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("config: {e}")))
    }

    /// Fields set in `over` win.
    pub fn overlay(self, over: PartialConfig) -> PartialConfig {
        // A sampling choice on the command line replaces the file's, whichever
        // variant either of them used.
        let sampling_overridden = over.box_count.is_some() || over.grid.is_some();
        let input_overridden = over.input.is_some() || over.shape.is_some();
        PartialConfig {
            input: if input_overridden { over.input } else { self.input },
            shape: if input_overridden { over.shape } else { self.shape },
            box_count: if sampling_overridden { over.box_count } else { self.box_count },
            grid: if sampling_overridden { over.grid } else { self.grid },
            k: over.k.or(self.k),
            n: over.n.or(self.n),
            m: over.m.or(self.m),
            seed: over.seed.or(self.seed),
            sharpness: over.sharpness.or(self.sharpness),
            out: over.out.or(self.out),
            emit: over.emit.or(self.emit),
        }
    }

    /// Applies defaults and validates.
    pub fn resolve(self) -> Result<PipelineConfig> {
        let input = match (self.input, self.shape) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("give either an input path or a shape, not both".into()))
            }
            (Some(p), None) => Some(Input::Path(p)),
            (None, Some(s)) => {
                s.parse::<ShapeSpec>()?;
                Some(Input::Shape(s))
            }
            (None, None) => None,
        };
        let sampling = match (self.box_count, self.grid) {
            (Some(_), Some(_)) => {
                return Err(Error::InvalidConfig("box_count and grid are mutually exclusive".into()))
            }
            (Some(b), None) => SamplingChoice::BoxCount(b),
            (None, Some(g)) => SamplingChoice::Grid(g),
            (None, None) => SamplingChoice::BoxCount(DEFAULT_BOX_COUNT),
        };
        let config = PipelineConfig {
            input,
            sampling,
            k: self.k.unwrap_or(DEFAULT_K),
            n: self.n.unwrap_or(DEFAULT_SKELETON_SIZE),
            m: self.m.unwrap_or(DEFAULT_SAMPLE_SIZE),
            seed: self.seed.unwrap_or(0),
            sharpness: self.sharpness.unwrap_or(DEFAULT_SHARPNESS),
            out: self.out.unwrap_or_else(|| PathBuf::from(".")),
            emit: self.emit.unwrap_or_else(Emit::default_set),
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingChoice {
    BoxCount(usize),
    Grid(usize),
}

/// Fully resolved configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    /// Absent only when every command input comes from other files.
    pub input: Option<Input>,
    pub sampling: SamplingChoice,
    pub k: usize,
    pub n: usize,
    /// Surface sample size for the `sample` command.
    pub m: usize,
    pub seed: u64,
    pub sharpness: f64,
    pub out: PathBuf,
    pub emit: BTreeSet<Emit>,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidConfig("m must be at least 1".into()));
        }
        if !(self.sharpness > 0.0 && self.sharpness.is_finite()) {
            return Err(Error::InvalidConfig(format!("sharpness must be positive, got {}", self.sharpness)));
        }
        if let SamplingChoice::Grid(g) = self.sampling {
            if g < 2 {
                return Err(Error::InvalidConfig("grid resolution must be at least 2".into()));
            }
        }
        self.params().validate()
    }

    pub fn params(&self) -> PipelineParams {
        PipelineParams {
            sampling: match self.sampling {
                SamplingChoice::BoxCount(box_count) => Sampling::Random { box_count },
                SamplingChoice::Grid(resolution) => Sampling::Grid { resolution },
            },
            k: self.k,
            n: self.n,
            seed: self.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = PartialConfig {
            shape: Some("sphere".into()),
            ..Default::default()
        }
        .resolve()
        .unwrap();
        assert_eq!(c.k, 20);
        assert_eq!(c.n, 1024);
        assert_eq!(c.seed, 0);
        assert_eq!(c.sampling, SamplingChoice::BoxCount(10_000_000));
        assert_eq!(c.emit, Emit::default_set());
    }

    #[test]
    fn flags_override_file() {
        let file = PartialConfig::from_json(r#"{"shape": "box", "grid": 32, "k": 8, "seed": 4}"#).unwrap();
        let flags = PartialConfig {
            box_count: Some(5000),
            k: Some(12),
            ..Default::default()
        };
        let c = file.overlay(flags).resolve().unwrap();
        assert_eq!(c.k, 12);
        assert_eq!(c.seed, 4);
        assert_eq!(c.sampling, SamplingChoice::BoxCount(5000));
        assert_eq!(c.input, Some(Input::Shape("box".into())));
    }

    #[test]
    fn invalid() {
        let base = || PartialConfig {
            shape: Some("sphere".into()),
            ..Default::default()
        };
        let bad = [
            PartialConfig { k: Some(0), ..base() },
            PartialConfig { n: Some(0), ..base() },
            PartialConfig { n: Some(2_000_000), box_count: Some(1_000_000), ..base() },
            PartialConfig { grid: Some(1), ..base() },
            PartialConfig { sharpness: Some(-1.0), ..base() },
            PartialConfig { input: Some("a.obj".into()), ..base() },
        ];
        for b in bad {
            assert!(matches!(b.clone().resolve(), Err(Error::InvalidConfig(_))), "{b:?}");
        }
        assert!(matches!(PartialConfig::from_json(r#"{"kk": 1}"#), Err(Error::Parse(_))));
        assert!(matches!(
            PartialConfig { shape: Some("cone".into()), ..Default::default() }.resolve(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn emit_lists() {
        assert_eq!(parse_emit_list("all").unwrap().len(), 5);
        let e = parse_emit_list("skeleton_ply,timings_csv").unwrap();
        assert!(e.contains(&Emit::TimingsCsv) && e.len() == 2);
        assert!(parse_emit_list("skeleton").is_err());
    }

    #[test]
    fn fuzz_seeds_parse() {
        let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus/fuzz_config");
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            let text = std::fs::read_to_string(&path).unwrap();
            PartialConfig::from_json(&text).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        }
    }
}
