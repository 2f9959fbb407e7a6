//! `planforge.toml` settings.
//!
//! Every key is optional. Command-line flags take precedence over the file.
//!
//! ```toml
//! seed = 42
//! grid = 64
//! resolution = 512
//! style = "se"        # r, sr, se, sre or all
//! jobs = 8
//! report = "markdown" # text, csv or markdown
//! threshold = 80.0    # palette quantization distance
//! samples = 10        # images per evaluation prompt
//! ```

use std::path::Path;

use serde::Deserialize;

use crate::decode::QUANTIZE_THRESHOLD;
use crate::eval::{ReportFormat, DEFAULT_SAMPLES};
use crate::render::DEFAULT_RESOLUTION;

pub const CONFIG_FILE: &str = "planforge.toml";
pub const DEFAULT_SEED: u64 = 0;
pub const MIN_GRID: i32 = 16;
pub const MAX_GRID: i32 = 256;

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub grid: Option<i32>,
    pub resolution: Option<u32>,
    pub style: Option<String>,
    pub jobs: Option<usize>,
    pub report: Option<String>,
    pub threshold: Option<f64>,
    pub samples: Option<u32>,
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid setting: {0}")]
    Invalid(String),
}

impl FileConfig {
    pub fn parse(text: &str, path: &str) -> Result<FileConfig, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse { path: path.to_string(), message: e.to_string() })
    }

    pub fn load(path: &Path) -> Result<FileConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.display().to_string(), source })?;
        FileConfig::parse(&text, &path.display().to_string())
    }

    /// An explicit path must exist; otherwise `./planforge.toml` is used if
    /// present.
    pub fn discover(explicit: Option<&Path>) -> Result<FileConfig, ConfigError> {
        match explicit {
            Some(p) => FileConfig::load(p),
            None if Path::new(CONFIG_FILE).is_file() => FileConfig::load(Path::new(CONFIG_FILE)),
            None => Ok(FileConfig::default()),
        }
    }
}

/// Settings shared by subcommands after merging flags over the file.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub seed: Option<u64>,
    /// Overrides the grid of input specs when set.
    pub grid: Option<i32>,
    pub resolution: u32,
    pub style: Option<String>,
    /// `None`: one worker per logical core.
    pub jobs: Option<usize>,
    pub report: ReportFormat,
    pub threshold: f64,
    pub samples: u32,
}

impl CliConfig {
    pub fn merge(flags: &FileConfig, file: &FileConfig) -> Result<CliConfig, ConfigError> {
        let report = match flags.report.as_ref().or(file.report.as_ref()) {
            Some(r) => r.parse().map_err(ConfigError::Invalid)?,
            None => ReportFormat::Text,
        };
        let cfg = CliConfig {
            seed: flags.seed.or(file.seed),
            grid: flags.grid.or(file.grid),
            resolution: flags.resolution.or(file.resolution).unwrap_or(DEFAULT_RESOLUTION),
            style: flags.style.clone().or_else(|| file.style.clone()),
            jobs: flags.jobs.or(file.jobs),
            report,
            threshold: flags.threshold.or(file.threshold).unwrap_or(QUANTIZE_THRESHOLD),
            samples: flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
        };
        if let Some(g) = cfg.grid.filter(|&g| !(MIN_GRID..=MAX_GRID).contains(&g)) {
            return Err(ConfigError::Invalid(format!("grid {g} outside {MIN_GRID}..={MAX_GRID}")));
        }
        if cfg.jobs == Some(0) {
            return Err(ConfigError::Invalid("jobs must be positive".into()));
        }
        if cfg.threshold.is_nan() || cfg.threshold <= 0.0 {
            return Err(ConfigError::Invalid(format!("threshold {} must be positive", cfg.threshold)));
        }
        Ok(cfg)
    }

    pub fn seed_or_default(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}
