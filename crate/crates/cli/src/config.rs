//! Flat TOML key-value configuration. Every key mirrors a long flag with
//! dashes replaced by underscores; flags given on the command line win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Settings {
    pub data: Option<PathBuf>,
    pub out: Option<PathBuf>,

    pub month: Option<String>,
    pub window_start: Option<String>,
    pub window_end: Option<String>,
    pub case_insensitive_match: Option<bool>,

    pub exclude_zero_views: Option<bool>,

    pub ridge: Option<f64>,
    pub interaction: Option<String>,

    pub platform_a: Option<String>,
    pub platform_b: Option<String>,
    pub min_edits: Option<usize>,
    pub accepted_only: Option<bool>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,

    pub mass_ranking: Option<String>,

    pub endpoint: Option<String>,
    pub wire: Option<String>,
    pub model: Option<String>,
    pub attempts: Option<usize>,
    pub concurrency: Option<usize>,
    pub cache_dir: Option<PathBuf>,
    pub min_chars: Option<usize>,
    pub timeout_secs: Option<u64>,

    pub sitemap: Option<String>,
    pub edit_requests_url: Option<String>,
    pub delay_ms: Option<u64>,
    pub max_in_flight: Option<usize>,
    pub limit: Option<usize>,

    pub seed: Option<u64>,
}

impl Settings {
    pub fn load(path: &Path) -> Result<Settings> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::usage(format!("config {}: {e}", path.display())))
    }
}

/// Flag value, else config value, else default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Boolean switches: set by the flag or by the config file.
pub fn switch(flag: bool, config: Option<bool>) -> bool {
    flag || config.unwrap_or(false)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_rejects_unknown_keys() {
        let s: Settings = toml::from_str("month = \"2025-11\"\nridge = 1e-6\ncase_insensitive_match = true").unwrap();
        assert_eq!(s.month.as_deref(), Some("2025-11"));
        assert_eq!(pick(None, s.ridge, 0.0), 1e-6);
        assert!(switch(false, s.case_insensitive_match));
        assert!(toml::from_str::<Settings>("colour = 1").is_err());
    }
}
