//! Settings resolved from flags, then environment, then `amalgamkit.toml` in the working directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

pub const CONFIG_FILE: &str = "amalgamkit.toml";
pub const CACHE_ENV: &str = "AMALGAMKIT_CACHE";
pub const DATA_ENV: &str = "AMALGAMKIT_DATA";
pub const BASE_URL_ENV: &str = "AMALGAMKIT_BASE_URL";
pub const DEFAULT_BASE_URL: &str = "https://brauer.maths.qmul.ac.uk/Atlas/v3";

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub cache_dir: Option<PathBuf>,
    pub data_root: Option<PathBuf>,
    pub base_url: Option<String>,
    pub offline: Option<bool>,
    pub retries: Option<u32>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(dir: &Path) -> Result<FileConfig, String> {
        let path = dir.join(CONFIG_FILE);
        match fs::read_to_string(&path) {
            Ok(text) => toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display())),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(FileConfig::default()),
            Err(e) => Err(format!("{}: {e}", path.display())),
        }
    }
}

/// Values given on the command line; `None` defers to the environment and config file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub cache_dir: Option<PathBuf>,
    pub data_root: Option<PathBuf>,
    pub base_url: Option<String>,
    pub offline: bool,
    pub threads: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub cache_dir: PathBuf,
    pub data_root: Option<PathBuf>,
    pub base_url: String,
    pub offline: bool,
    pub retries: u32,
    pub threads: usize,
}

fn env_path(name: &str) -> Option<PathBuf> {
    std::env::var_os(name).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn default_cache_dir() -> PathBuf {
    match env_path("XDG_CACHE_HOME").or_else(|| env_path("HOME").map(|h| h.join(".cache"))) {
        Some(base) => base.join("amalgamkit"),
        None => PathBuf::from(".amalgamkit-cache"),
    }
}

fn default_data_root() -> Option<PathBuf> {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data");
    shipped.is_dir().then_some(shipped)
}

pub fn resolve(flags: &Overrides, file: FileConfig) -> Settings {
    Settings {
        cache_dir: flags.cache_dir.clone().or_else(|| env_path(CACHE_ENV)).or(file.cache_dir).unwrap_or_else(default_cache_dir),
        data_root: flags.data_root.clone().or_else(|| env_path(DATA_ENV)).or(file.data_root).or_else(default_data_root),
        base_url: flags
            .base_url
            .clone()
            .or_else(|| std::env::var(BASE_URL_ENV).ok().filter(|v| !v.is_empty()))
            .or(file.base_url)
            .unwrap_or_else(|| DEFAULT_BASE_URL.to_string()),
        offline: flags.offline || file.offline.unwrap_or(false),
        retries: file.retries.unwrap_or(3),
        threads: flags.threads.or(file.threads).unwrap_or(0),
    }
}
