use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Settings read from `--config`. Every field is optional and any flag given
/// on the command line wins.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub order: Option<u64>,
    pub k: Option<u64>,
    pub k_max: Option<u64>,
    pub h: Option<u64>,
    pub kappa_max: Option<u64>,
    pub chunks: Option<usize>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub plot: Option<PathBuf>,
    pub cell_cache: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }
}

pub const THREADS_ENV: &str = "FAREY_LAB_THREADS";

/// Chunk count when neither a flag nor the config file sets one.
pub fn default_chunks() -> Result<usize, String> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(format!("{THREADS_ENV} must be a positive integer, got {v:?}")),
        },
        Err(_) => Ok(std::thread::available_parallelism().map_or(1, |n| n.get())),
    }
}
