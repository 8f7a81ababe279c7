use std::path::Path;

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};

use listgaze::gaze::FixationParams;
use listgaze::saliency::{GbvsParams, IttiParams};

use crate::manifest::read_input;
use crate::GlobalArgs;

pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_K: usize = 3;

/// JSON run configuration. Every field is optional in the file; command-line
/// flags take precedence over it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub itti: IttiParams,
    pub gbvs: GbvsParams,
    pub fixation: FixationParams,
    pub k: usize,
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            itti: IttiParams::default(),
            gbvs: GbvsParams::default(),
            fixation: FixationParams::default(),
            k: DEFAULT_K,
            jobs: None,
        }
    }
}

/// Resolved configuration plus the raw config bytes, if a file was given.
pub struct Loaded {
    pub config: RunConfig,
    pub source: Option<(String, Vec<u8>)>,
}

pub fn load(global: &GlobalArgs) -> Result<Loaded> {
    let (mut config, source) = match &global.config {
        Some(path) => {
            let (bytes, name) = read_input(path)?;
            let config: RunConfig = serde_json::from_slice(&bytes)
                .map_err(listgaze::Error::from)
                .with_context(|| format!("parsing config {}", path.display()))?;
            (config, Some((name, bytes)))
        }
        None => (RunConfig::default(), None),
    };
    if let Some(seed) = global.seed {
        config.seed = seed;
    }
    if global.jobs.is_some() {
        config.jobs = global.jobs;
    }
    Ok(Loaded { config, source })
}

/// Parses a model parameter file as `T`.
pub fn read_params<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<(T, String, Vec<u8>)> {
    let (bytes, name) = read_input(path)?;
    let params = serde_json::from_slice(&bytes)
        .map_err(listgaze::Error::from)
        .with_context(|| format!("parsing params {}", path.display()))?;
    Ok((params, name, bytes))
}
