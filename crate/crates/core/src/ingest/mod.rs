//! Parsers for platform snapshots and Wikimedia dumps, and cross-platform
//! page matching.
//!
//! Every parser is single-pass over its input and reports what it skipped in
//! a [`Diagnostics`] tally.

mod edit_requests;
mod grokipedia;
mod matching;
mod pageviews;
mod revisions;
mod sitemap;

use std::fmt;

use serde::Serialize;

pub use edit_requests::{parse_edit_requests, EditRequest};
pub use grokipedia::{classify_grokipedia_page, PageStatus, RawGrokipediaPage, CC_FOOTER, MISSING_MARKER};
pub use matching::{match_titles, normalize_title, MatchKind, MatchOptions, MatchReport, PagePairing};
pub use pageviews::{date_from_filename, parse_pageviews, PageViewRecord, PageviewOptions, YearMonth};
pub use revisions::{parse_revision_history, parse_timestamp, HistoryColumns, RevisionRecord, Window};
pub use sitemap::{parse_sitemap, slug_from_url, Sitemap};

/// Per-stream line accounting: `accepted + filtered + malformed == lines`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Diagnostics {
    pub lines: usize,
    pub accepted: usize,
    /// Well-formed lines outside the requested selection.
    pub filtered: usize,
    pub malformed: usize,
}

impl Diagnostics {
    pub fn skipped(&self) -> usize {
        self.filtered + self.malformed
    }

    pub fn merge(&mut self, other: Diagnostics) {
        self.lines += other.lines;
        self.accepted += other.accepted;
        self.filtered += other.filtered;
        self.malformed += other.malformed;
    }

    fn tally(&mut self, outcome: LineOutcome) {
        self.lines += 1;
        match outcome {
            LineOutcome::Accepted => self.accepted += 1,
            LineOutcome::Filtered => self.filtered += 1,
            LineOutcome::Malformed => self.malformed += 1,
        }
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} lines: {} accepted, {} filtered, {} malformed",
            self.lines, self.accepted, self.filtered, self.malformed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LineOutcome {
    Accepted,
    Filtered,
    Malformed,
}
