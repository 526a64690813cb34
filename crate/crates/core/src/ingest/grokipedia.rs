use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::html::visible_text;
use crate::{Error, Result};

/// Footer carried by pages reproduced from Wikipedia without rewriting.
pub const CC_FOOTER: &str =
    "The content is adapted from Wikipedia, licensed under Creative Commons Attribution-ShareAlike 4.0 License";

/// Body text of a slug with no article.
pub const MISSING_MARKER: &str = "This page doesn't exist... yet";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum PageStatus {
    Missing,
    Verbatim,
    Rewritten,
}

impl PageStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PageStatus::Missing => "missing",
            PageStatus::Verbatim => "verbatim",
            PageStatus::Rewritten => "rewritten",
        }
    }
}

impl fmt::Display for PageStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PageStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "missing" => Ok(PageStatus::Missing),
            "verbatim" => Ok(PageStatus::Verbatim),
            "rewritten" => Ok(PageStatus::Rewritten),
            other => Err(Error::parse(format!("unknown page status {other:?}"))),
        }
    }
}

/// One fetched snapshot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawGrokipediaPage {
    pub slug: String,
    pub html: String,
    /// UTC seconds.
    pub fetched_at: i64,
}

impl RawGrokipediaPage {
    pub fn classify(&self) -> Result<PageStatus> {
        classify_grokipedia_page(&self.html).map_err(|e| match e {
            Error::MalformedPage { reason, .. } => Error::MalformedPage { slug: self.slug.clone(), reason },
            other => other,
        })
    }
}

/// Missing when the article region holds nothing but the missing marker,
/// Verbatim when the visible text carries the exact CC footer, Rewritten
/// otherwise. The article region is the first `<article>` element, else the
/// first `<main>`, else the whole document.
pub fn classify_grokipedia_page(html: &str) -> Result<PageStatus> {
    if html.trim().is_empty() {
        return Err(Error::MalformedPage { slug: String::new(), reason: "empty markup".into() });
    }
    let text = visible_text(html);
    if text.contains(MISSING_MARKER) {
        let region = visible_text(article_region(html));
        if region.replace(MISSING_MARKER, "").trim().is_empty() {
            return Ok(PageStatus::Missing);
        }
    }
    if text.contains(CC_FOOTER) {
        Ok(PageStatus::Verbatim)
    } else {
        Ok(PageStatus::Rewritten)
    }
}

fn article_region(html: &str) -> &str {
    element_inner(html, "article").or_else(|| element_inner(html, "main")).unwrap_or(html)
}

fn element_inner<'a>(html: &'a str, name: &str) -> Option<&'a str> {
    let lower = html.to_ascii_lowercase();
    let open = format!("<{name}");
    let mut from = 0;
    let start = loop {
        let at = from + lower[from..].find(&open)?;
        let after = lower.as_bytes().get(at + open.len()).copied();
        if matches!(after, Some(b'>') | Some(b' ') | Some(b'\t') | Some(b'\n') | Some(b'\r')) {
            break at;
        }
        from = at + open.len();
    };
    let body = start + lower[start..].find('>')? + 1;
    let end = lower[body..].find(&format!("</{name}>")).map_or(html.len(), |e| body + e);
    Some(&html[body..end])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_markers() {
        let verbatim = format!("<html><body><article><p>Text.</p></article><footer><p>{CC_FOOTER}</p></footer></body></html>");
        assert_eq!(classify_grokipedia_page(&verbatim).unwrap(), PageStatus::Verbatim);
        let missing = format!("<html><body><nav>Home Search</nav><main><h1>{MISSING_MARKER}</h1></main></body></html>");
        assert_eq!(classify_grokipedia_page(&missing).unwrap(), PageStatus::Missing);
        let rewritten = "<html><body><article><p>Original prose.</p></article></body></html>";
        assert_eq!(classify_grokipedia_page(rewritten).unwrap(), PageStatus::Rewritten);
    }

    #[test]
    fn footer_split_by_markup_still_matches() {
        let html = "<p>The content is adapted from <a href=\"w\">Wikipedia</a>, licensed under\n <a>Creative Commons \
                    Attribution-ShareAlike 4.0 License</a></p>";
        assert_eq!(classify_grokipedia_page(html).unwrap(), PageStatus::Verbatim);
    }

    #[test]
    fn marker_quoted_in_an_article_is_not_missing() {
        let html = format!("<article><p>The error text reads \"{MISSING_MARKER}\" on absent slugs.</p></article>");
        assert_eq!(classify_grokipedia_page(&html).unwrap(), PageStatus::Rewritten);
    }

    #[test]
    fn empty_markup_is_malformed() {
        let page = RawGrokipediaPage { slug: "X".into(), html: " ".into(), fetched_at: 0 };
        match page.classify() {
            Err(Error::MalformedPage { slug, .. }) => assert_eq!(slug, "X"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn element_lookup_skips_prefix_names() {
        assert_eq!(element_inner("<mainly>x</mainly><main id=a>y</main>", "main"), Some("y"));
        assert_eq!(element_inner("<p>z</p>", "main"), None);
    }
}
