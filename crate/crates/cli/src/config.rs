use std::path::{Path, PathBuf};

use serde::Deserialize;
use sgnp_core::bench::Algorithm;
use sgnp_core::{DsgaConfig, GeneratorConfig};

use crate::error::CliError;

/// Contents of a `--config` TOML file. Every section is optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub generator: GeneratorConfig,
    pub dsga: DsgaConfig,
    pub suite: SuiteConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    /// Instance files, resolved relative to the config file.
    pub instances: Vec<PathBuf>,
    /// Instances generated on the fly from the `[generator]` section.
    pub generate: Vec<GeneratedInstance>,
    pub algorithms: Vec<Algorithm>,
    pub runs: usize,
    /// Run `r` uses seed `seed + r`.
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self { instances: Vec::new(), generate: Vec::new(), algorithms: vec![Algorithm::Dsga], runs: 10, seed: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratedInstance {
    pub tasks: usize,
    pub seed: u64,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })?;
        let mut config: FileConfig =
            toml::from_str(&text).map_err(|e| CliError::Config { path: path.to_path_buf(), message: e.to_string() })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in &mut config.suite.instances {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }
}
