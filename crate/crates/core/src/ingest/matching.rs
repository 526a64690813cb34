use std::collections::{BTreeMap, BTreeSet};

use percent_encoding::percent_decode_str;
use serde::Serialize;

use crate::{Error, Result};

/// Trims, percent-decodes and maps underscores to spaces. Invalid escape
/// sequences are left as written.
pub fn normalize_title(raw: &str) -> String {
    let decoded = percent_decode_str(raw.trim()).decode_utf8_lossy();
    let spaced = decoded.replace('_', " ");
    spaced.split(' ').filter(|w| !w.is_empty()).collect::<Vec<_>>().join(" ")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MatchKind {
    /// Literal string equality.
    Exact,
    /// Equal only after normalization.
    Normalized,
}

impl MatchKind {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchKind::Exact => "exact",
            MatchKind::Normalized => "normalized",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PagePairing {
    pub wiki_title: String,
    pub grok_slug: String,
    pub match_kind: MatchKind,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MatchOptions {
    pub case_insensitive: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct MatchReport {
    /// Sorted by wiki title.
    pub pairings: Vec<PagePairing>,
    pub unmatched_titles: Vec<String>,
    pub unmatched_slugs: Vec<String>,
}

fn keyed<'a>(items: &'a BTreeSet<String>, options: MatchOptions, side: &str) -> Result<BTreeMap<String, &'a str>> {
    let mut by_key: BTreeMap<String, &str> = BTreeMap::new();
    for item in items {
        let mut key = normalize_title(item);
        if options.case_insensitive {
            key = key.to_lowercase();
        }
        if let Some(prev) = by_key.insert(key.clone(), item) {
            return Err(Error::Ambiguous(format!("{side} {prev:?} and {item:?} both normalize to {key:?}")));
        }
    }
    Ok(by_key)
}

/// One-to-one pairing by normalized key.
pub fn match_titles(wiki_titles: &BTreeSet<String>, grok_slugs: &BTreeSet<String>, options: MatchOptions) -> Result<MatchReport> {
    let wiki = keyed(wiki_titles, options, "wiki titles")?;
    let grok = keyed(grok_slugs, options, "slugs")?;

    let mut report = MatchReport::default();
    for (key, title) in &wiki {
        match grok.get(key) {
            Some(slug) => report.pairings.push(PagePairing {
                wiki_title: title.to_string(),
                grok_slug: slug.to_string(),
                match_kind: if title == slug { MatchKind::Exact } else { MatchKind::Normalized },
            }),
            None => report.unmatched_titles.push(title.to_string()),
        }
    }
    report.unmatched_slugs = grok.iter().filter(|(k, _)| !wiki.contains_key(*k)).map(|(_, s)| s.to_string()).collect();
    report.pairings.sort();
    report.unmatched_titles.sort();
    report.unmatched_slugs.sort();
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_title(" Dick_Cheney "), "Dick Cheney");
        assert_eq!(normalize_title("Caf%C3%A9_society"), "Café society");
        assert_eq!(normalize_title("100%_Pure"), "100% Pure");
        assert_eq!(normalize_title("A__B"), "A B");
    }

    #[test]
    fn pairing_kinds_and_unmatched() {
        let r = match_titles(&set(&["Dick Cheney", "Paris", "Nowhere"]), &set(&["Dick_Cheney", "Paris", "Extra"]), MatchOptions::default())
            .unwrap();
        assert_eq!(
            r.pairings,
            vec![
                PagePairing { wiki_title: "Dick Cheney".into(), grok_slug: "Dick_Cheney".into(), match_kind: MatchKind::Normalized },
                PagePairing { wiki_title: "Paris".into(), grok_slug: "Paris".into(), match_kind: MatchKind::Exact },
            ]
        );
        assert_eq!(r.unmatched_titles, vec!["Nowhere"]);
        assert_eq!(r.unmatched_slugs, vec!["Extra"]);
    }

    #[test]
    fn case_sensitivity_is_opt_in() {
        let wiki = set(&["Iphone"]);
        let grok = set(&["IPhone"]);
        assert!(match_titles(&wiki, &grok, MatchOptions::default()).unwrap().pairings.is_empty());
        let r = match_titles(&wiki, &grok, MatchOptions { case_insensitive: true }).unwrap();
        assert_eq!(r.pairings[0].match_kind, MatchKind::Normalized);
    }

    #[test]
    fn collisions_are_ambiguous() {
        let err = match_titles(&set(&["A B", "A_B"]), &set(&["A_B"]), MatchOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Ambiguous(ref m) if m.contains("\"A B\"") && m.contains("\"A_B\"")), "{err}");
    }
}
