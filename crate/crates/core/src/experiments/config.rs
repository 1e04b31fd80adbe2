use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::distributions::ValueDistribution;
use crate::error::{Error, Result};
use crate::rsop::DEFAULT_ALPHA;
use crate::strategic::Mode;

/// Inclusive range of exponents `i`; the grid visits `n = 2^i`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExponentRange {
    pub start: u32,
    pub end: u32,
}

impl Default for ExponentRange {
    fn default() -> Self {
        Self { start: 3, end: 17 }
    }
}

impl ExponentRange {
    pub fn iter(self) -> impl Iterator<Item = u32> {
        self.start..=self.end
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(Error::InvalidConfig(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: OutputFormat,
}

/// Which per-run statistics a grid computes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    /// Discount ratios plus revenues.
    #[default]
    Discount,
    /// Revenues and gain ratio only.
    Rsop,
}

fn default_runs() -> usize {
    100
}

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub distributions: Vec<ValueDistribution>,
    #[serde(default)]
    pub n_exponents: ExponentRange,
    #[serde(default = "default_runs")]
    pub runs_per_point: usize,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub base_seed: u64,
    /// Users sampled for `delta_avg`. `None`: every user up to `n = 4096`,
    /// 256 sampled users beyond.
    #[serde(default)]
    pub avg_subsample: Option<usize>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    pub output: OutputSpec,
    #[serde(default)]
    pub grid: GridKind,
}

/// Largest `n` averaged over every user when no subsample is configured.
pub(crate) const EXACT_AVERAGE_LIMIT: usize = 1 << 12;
pub(crate) const DEFAULT_SUBSAMPLE: usize = 256;

impl ExperimentConfig {
    /// A config with defaults for everything but the distributions and
    /// output path.
    pub fn new(distributions: Vec<ValueDistribution>, output: impl Into<PathBuf>) -> Self {
        Self {
            distributions,
            n_exponents: ExponentRange::default(),
            runs_per_point: default_runs(),
            mode: Mode::default(),
            base_seed: 0,
            avg_subsample: None,
            alpha: DEFAULT_ALPHA,
            output: OutputSpec {
                path: output.into(),
                format: OutputFormat::Csv,
            },
            grid: GridKind::default(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(s).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses `bytes` as JSON if the first non-blank byte is `{`, else TOML.
    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let text = std::str::from_utf8(bytes)
            .map_err(|e| Error::InvalidConfig(format!("config is not UTF-8: {e}")))?;
        if text.trim_start().starts_with('{') {
            Self::from_json_str(text)
        } else {
            Self::from_toml_str(text)
        }
    }

    /// Reads a `.json` or `.toml` file (other extensions are sniffed).
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::FileNotFound(path.to_path_buf()),
            _ => Error::Io(e),
        })?;
        let text = String::from_utf8(bytes)
            .map_err(|e| Error::InvalidConfig(format!("config is not UTF-8: {e}")))?;
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Self::from_json_str(&text),
            Some("toml") => Self::from_toml_str(&text),
            _ => Self::from_slice(text.as_bytes()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.distributions.is_empty() {
            return Err(Error::InvalidConfig("no distributions".into()));
        }
        if self.runs_per_point == 0 {
            return Err(Error::InvalidConfig("runs_per_point must be at least 1".into()));
        }
        let r = self.n_exponents;
        if r.start > r.end {
            return Err(Error::InvalidConfig(format!(
                "empty exponent range {}..={}",
                r.start, r.end
            )));
        }
        if r.start < 1 || r.end > 30 {
            return Err(Error::InvalidConfig(format!(
                "exponents must lie in 1..=30, got {}..={}",
                r.start, r.end
            )));
        }
        if self.avg_subsample == Some(0) {
            return Err(Error::InvalidConfig("avg_subsample must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidAlpha(self.alpha));
        }
        Ok(())
    }

    /// Users averaged at population size `n`, or `None` for all of them.
    pub fn subsample_at(&self, n: usize) -> Option<usize> {
        match self.avg_subsample {
            Some(k) if n > k => Some(k),
            Some(_) => None,
            None if n > EXACT_AVERAGE_LIMIT => Some(DEFAULT_SUBSAMPLE),
            None => None,
        }
    }
}
