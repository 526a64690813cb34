//! Lead-section framing scores.
//!
//! A lead is everything before the first heading. Eligible leads are split
//! into sentences, every sentence is labeled on two binary dimensions by a
//! structured-output LLM, and a page's score per dimension is the share of
//! scored sentences carrying the label.

mod annotate;
#[cfg(feature = "http")]
mod http;
mod sentences;

use serde::Serialize;

pub use annotate::{
    annotate_sentences, framing_prompt, parse_labels, response_schema, AnnotationBackend, AnnotationRequest,
    AnnotatorConfig, FramingLabels, SentenceAnnotation, SentenceCache, FRAMING_PROMPT_TEMPLATE, SENTENCE_PLACEHOLDER,
};
#[cfg(feature = "http")]
pub use http::{HttpBackend, WireFormat};
pub use sentences::{RuleSplitter, SentenceSplitter, DEFAULT_ABBREVIATIONS};

use crate::html::{collapse_whitespace, visible_text};
use crate::narrative::Platform;
use crate::{Error, Result};

pub const DEFAULT_MIN_CHARS: usize = 500;
pub const DEFAULT_MODEL: &str = "gemma3:4b";

/// Where headings start in an article's markup.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HeadingStyle {
    /// Lines of the form `== Heading ==` (any level).
    Wikitext,
    /// Lines starting with `#`.
    Markdown,
    /// `<hN>` tags with N ≥ `min_level`; the lead is converted to plain text.
    Html { min_level: u8 },
}

impl HeadingStyle {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wikitext" => Ok(HeadingStyle::Wikitext),
            "markdown" | "md" => Ok(HeadingStyle::Markdown),
            "html" => Ok(HeadingStyle::Html { min_level: 2 }),
            "html1" => Ok(HeadingStyle::Html { min_level: 1 }),
            other => Err(Error::parse(format!("unknown heading style {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeadSection {
    pub title: String,
    pub platform: Platform,
    pub text: String,
    pub char_count: usize,
}

impl LeadSection {
    pub fn new(title: impl Into<String>, platform: Platform, text: impl Into<String>) -> Self {
        let text = text.into();
        LeadSection { title: title.into(), platform, char_count: text.chars().count(), text }
    }

    pub fn is_eligible(&self, min_chars: usize) -> bool {
        self.char_count >= min_chars
    }
}

/// Text preceding the first heading, whitespace-trimmed.
pub fn extract_lead(title: &str, platform: Platform, article: &str, style: HeadingStyle) -> Result<LeadSection> {
    if article.trim().is_empty() {
        return Err(Error::invalid(format!("article {title:?} is empty")));
    }
    let text = match style {
        HeadingStyle::Wikitext => before_heading_line(article, |l| {
            let l = l.trim();
            l.len() >= 4 && l.starts_with("==") && l.ends_with("==")
        }),
        HeadingStyle::Markdown => before_heading_line(article, |l| l.trim_start().starts_with('#')),
        HeadingStyle::Html { min_level } => {
            let cut = first_html_heading(article, min_level).unwrap_or(article.len());
            let lead = if min_level > 1 { without_title_headings(&article[..cut]) } else { article[..cut].to_string() };
            collapse_whitespace(&visible_text(&lead))
        }
    };
    Ok(LeadSection::new(title, platform, text.trim()))
}

fn before_heading_line(article: &str, is_heading: impl Fn(&str) -> bool) -> String {
    let mut offset = 0;
    for line in article.split_inclusive('\n') {
        if is_heading(line) {
            return article[..offset].to_string();
        }
        offset += line.len();
    }
    article.to_string()
}

/// Drops `<h1>…</h1>` elements, which carry the page title rather than lead text.
fn without_title_headings(html: &str) -> String {
    let mut out = String::with_capacity(html.len());
    let mut rest = html;
    while let Some(start) = first_html_heading(rest, 1).filter(|&s| rest[s + 2..].starts_with('1')) {
        out.push_str(&rest[..start]);
        let lower = rest[start..].to_ascii_lowercase();
        rest = match lower.find("</h1>") {
            Some(end) => &rest[start + end + 5..],
            None => "",
        };
    }
    out.push_str(rest);
    out
}

fn first_html_heading(html: &str, min_level: u8) -> Option<usize> {
    let bytes = html.as_bytes();
    let mut i = 0;
    while let Some(pos) = html[i..].find('<') {
        let at = i + pos;
        if let [b'h' | b'H', d @ b'1'..=b'6', next, ..] = bytes.get(at + 1..at + 4).unwrap_or(&[]) {
            if d - b'0' >= min_level && (*next == b'>' || next.is_ascii_whitespace()) {
                return Some(at);
            }
        }
        i = at + 1;
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FramingScore {
    pub page: String,
    pub platform: Platform,
    pub laudatory_fraction: f64,
    pub conflict_fraction: f64,
    pub n_sentences: usize,
    pub n_unscored: usize,
}

/// Why a page gets no framing score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Exclusion {
    ShortLead { chars: usize, min_chars: usize },
    Unscorable { sentences: usize },
}

impl std::fmt::Display for Exclusion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exclusion::ShortLead { chars, min_chars } => write!(f, "lead has {chars} characters, fewer than {min_chars}"),
            Exclusion::Unscorable { sentences } => write!(f, "page unscorable: none of {sentences} sentences scored"),
        }
    }
}

/// Mean of each binary label over scored sentences; unscored sentences
/// are left out of the denominator.
pub fn framing_score(annotations: &[SentenceAnnotation], lead: &LeadSection, min_chars: usize) -> Result<FramingScore, Exclusion> {
    if !lead.is_eligible(min_chars) {
        return Err(Exclusion::ShortLead { chars: lead.char_count, min_chars });
    }
    let scored: Vec<FramingLabels> = annotations.iter().filter_map(|a| a.labels).collect();
    if scored.is_empty() {
        return Err(Exclusion::Unscorable { sentences: annotations.len() });
    }
    let n = scored.len() as f64;
    let fraction = |f: fn(&FramingLabels) -> bool| scored.iter().filter(|l| f(l)).count() as f64 / n;
    Ok(FramingScore {
        page: lead.title.clone(),
        platform: lead.platform,
        laudatory_fraction: fraction(|l| l.laudatory),
        conflict_fraction: fraction(|l| l.conflict),
        n_sentences: annotations.len(),
        n_unscored: annotations.len() - scored.len(),
    })
}
