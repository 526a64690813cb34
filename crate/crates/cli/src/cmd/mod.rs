pub mod complexity;
pub mod features;
pub mod fetch;
pub mod fit;
pub mod framing;
pub mod ingest;
pub mod narrative;
pub mod report;
pub mod synth;

use std::collections::BTreeMap;

use encyclodiff::ingest::{PageStatus, Window, YearMonth};

use crate::config::{pick, Settings};
use crate::error::{CliError, Result};
use crate::layout::{producer, Layout};
use crate::table::Table;

pub const DEFAULT_WINDOW_START: &str = "2025-10-27";
pub const DEFAULT_WINDOW_END: &str = "2025-11-24";

pub fn window(start: Option<String>, end: Option<String>, settings: &Settings) -> Result<Window> {
    let start = pick(start, settings.window_start.clone(), DEFAULT_WINDOW_START.to_string());
    let end = pick(end, settings.window_end.clone(), DEFAULT_WINDOW_END.to_string());
    Window::parse(&start, &end).map_err(|e| CliError::usage(e.to_string()))
}

pub fn month(flag: Option<String>, settings: &Settings) -> Result<Option<YearMonth>> {
    flag.or(settings.month.clone()).map(|m| m.parse().map_err(|e: encyclodiff::Error| CliError::usage(e.to_string()))).transpose()
}

/// Wikipedia universe: title → reference count.
pub fn wiki_universe(layout: &Layout) -> Result<BTreeMap<String, u64>> {
    let t = Table::read_input(&layout.wiki_pages())?;
    let (title, refs) = (t.col("title")?, t.col("references")?);
    let mut out = BTreeMap::new();
    for row in &t.rows {
        let name = row[title].trim().to_string();
        if name.is_empty() {
            return Err(CliError::input(&t.path, "empty title"));
        }
        if out.insert(name.clone(), t.parse(row, refs)?).is_some() {
            return Err(CliError::input(&t.path, format!("duplicate title {name:?}")));
        }
    }
    Ok(out)
}

/// Snapshot slug → (status, paired wiki title) from `pages.tsv` and `pairings.tsv`.
pub struct StagedPages {
    pub status: BTreeMap<String, PageStatus>,
    pub wiki_for_slug: BTreeMap<String, String>,
}

impl StagedPages {
    pub fn load(layout: &Layout) -> Result<StagedPages> {
        let pages = Table::read(&layout.output("pages.tsv"), producer::INGEST)?;
        let (slug, status) = (pages.col("slug")?, pages.col("status")?);
        let mut staged = StagedPages { status: BTreeMap::new(), wiki_for_slug: BTreeMap::new() };
        for row in &pages.rows {
            staged.status.insert(row[slug].to_string(), pages.parse(row, status)?);
        }
        let pairings = Table::read(&layout.output("pairings.tsv"), producer::INGEST)?;
        let (w, g) = (pairings.col("wiki_title")?, pairings.col("grok_slug")?);
        for row in &pairings.rows {
            staged.wiki_for_slug.insert(row[g].to_string(), row[w].to_string());
        }
        Ok(staged)
    }

    /// Wiki titles paired with a snapshot that is not Missing, with the status.
    pub fn present(&self) -> BTreeMap<String, PageStatus> {
        self.wiki_for_slug
            .iter()
            .filter_map(|(slug, title)| match self.status.get(slug) {
                Some(PageStatus::Missing) | None => None,
                Some(s) => Some((title.clone(), *s)),
            })
            .collect()
    }
}
