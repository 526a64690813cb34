//! Where each subcommand reads and writes.
//!
//! Inputs live under the data directory:
//!
//! ```text
//! grokipedia/pages/<slug>.html
//! grokipedia/edit_requests/<slug>.json
//! wikipedia/pages.tsv                  title, references
//! wikipedia/pageviews/pageviews-YYYYMMDD*.txt
//! wikipedia/history/*.tsv              mediawiki-history rows
//! narrative/{triplets,aliases,page_context,polarity_map}.tsv
//! framing/manifest.tsv                 page, platform, style, path
//! ```

use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

#[derive(Debug, Clone)]
pub struct Layout {
    pub data: PathBuf,
    pub out: PathBuf,
}

impl Layout {
    pub fn grok_pages(&self) -> PathBuf {
        self.data.join("grokipedia/pages")
    }

    pub fn edit_requests(&self) -> PathBuf {
        self.data.join("grokipedia/edit_requests")
    }

    pub fn wiki_pages(&self) -> PathBuf {
        self.data.join("wikipedia/pages.tsv")
    }

    pub fn pageviews(&self) -> PathBuf {
        self.data.join("wikipedia/pageviews")
    }

    pub fn history(&self) -> PathBuf {
        self.data.join("wikipedia/history")
    }

    pub fn narrative(&self, file: &str) -> PathBuf {
        self.data.join("narrative").join(file)
    }

    pub fn framing_manifest(&self) -> PathBuf {
        self.data.join("framing/manifest.tsv")
    }

    pub fn output(&self, file: &str) -> PathBuf {
        self.out.join(file)
    }

    pub fn report(&self, file: &str) -> PathBuf {
        self.out.join("report").join(file)
    }
}

/// Fails before any work starts if an input is absent.
pub fn require(paths: &[&Path]) -> Result<()> {
    match paths.iter().find(|p| !p.exists()) {
        Some(p) => Err(CliError::input(*p, "input not found")),
        None => Ok(()),
    }
}

/// Files in `dir` with the given extension, sorted by name.
pub fn files_with_extension(dir: &Path, ext: &str) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        let path = entry.map_err(|e| CliError::io(dir, e))?.path();
        if path.is_file() && path.extension().and_then(|e| e.to_str()) == Some(ext) {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn file_name(path: &Path) -> String {
    path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

pub fn file_stem(path: &Path) -> String {
    path.file_stem().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}

/// Producer of each staged artifact, named in missing-input errors.
pub mod producer {
    pub const INGEST: &str = "ingest";
    pub const FEATURES: &str = "features";
    pub const FIT_INCLUSION: &str = "fit-inclusion";
    pub const FIT_REWRITE: &str = "fit-rewrite";
    pub const COMPLEXITY: &str = "complexity";
    pub const NARRATIVE: &str = "narrative";
    pub const FRAMING: &str = "framing";
}
