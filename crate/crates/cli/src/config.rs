use std::path::Path;

use serde::{Deserialize, Serialize};
use vra::evaluation::BenchConfig;
use vra::preprocess::{CropOrder, DEFAULT_ENLARGE_FACTOR};
use vra::synth::SynthConfig;

use crate::error::{CliError, Result};

/// Everything a TOML config file may set. Every field is optional and
/// command-line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub crop: CropConfig,
    pub extract: ExtractConfig,
    pub bench: BenchConfig,
    pub synth: SynthConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CropConfig {
    pub factor: f64,
    pub order: CropOrder,
}

impl Default for CropConfig {
    fn default() -> Self {
        Self {
            factor: DEFAULT_ENLARGE_FACTOR,
            order: CropOrder::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExtractConfig {
    /// Keep every `stride`-th frame.
    pub stride: usize,
}

impl Default for ExtractConfig {
    fn default() -> Self {
        Self { stride: 1 }
    }
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| {
            CliError::config(
                format!("{}: {}", path.display(), e.message()),
                "see the README for the config sections ([crop], [extract], [bench], [synth])",
            )
        })
    }
}
