//! Experiment defaults read from a JSON file. Command-line flags win.

use std::path::Path;

use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub capacity: Option<usize>,
    pub group: Option<String>,
    pub right: Option<String>,
    pub dl: Option<String>,
    pub radius: Option<u32>,
    pub window: Option<i64>,
    pub grid: Option<String>,
    pub basepoints: Option<usize>,
    pub walk: Option<usize>,
    pub k: Option<usize>,
    pub tree_radius: Option<u32>,
    pub h_radius: Option<u32>,
    pub min_length: Option<usize>,
    pub max_radius: Option<u32>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}
