use percent_encoding::percent_decode_str;
use quick_xml::events::Event;
use quick_xml::Reader;

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sitemap {
    /// `<urlset>`: page locations.
    Pages(Vec<String>),
    /// `<sitemapindex>`: locations of child sitemaps.
    Index(Vec<String>),
}

/// Collects `<loc>` values of a sitemap or sitemap index.
pub fn parse_sitemap(xml: &str) -> Result<Sitemap> {
    let mut reader = Reader::from_str(xml);
    reader.config_mut().trim_text(true);
    let mut root: Option<String> = None;
    let mut in_loc = false;
    let mut text_started = false;
    let mut locs = Vec::new();
    loop {
        match reader.read_event() {
            Ok(Event::Start(e)) => {
                let name = e.local_name().into_inner().to_string();
                if root.is_none() {
                    root = Some(name.clone());
                }
                in_loc = name == "loc";
                text_started = false;
            }
            Ok(Event::Text(t)) if in_loc => {
                push_piece(&mut locs, text_started, t.xml10_content().trim());
                text_started = true;
            }
            Ok(Event::GeneralRef(r)) if in_loc => {
                // entities arrive as their own events between text pieces
                let resolved = match r.resolve_char_ref().map_err(|e| Error::parse(format!("sitemap: {e}")))? {
                    Some(c) => c.to_string(),
                    None => {
                        let name = r.into_inner();
                        quick_xml::escape::resolve_predefined_entity(&name)
                            .ok_or_else(|| Error::parse(format!("sitemap: unknown entity &{name};")))?
                            .to_string()
                    }
                };
                push_piece(&mut locs, text_started, &resolved);
                text_started = true;
            }
            Ok(Event::End(_)) => in_loc = false,
            Ok(Event::Eof) => break,
            Ok(_) => {}
            Err(e) => return Err(Error::parse(format!("sitemap at byte {}: {e}", reader.error_position()))),
        }
    }
    match root.as_deref() {
        Some("urlset") => Ok(Sitemap::Pages(locs)),
        Some("sitemapindex") => Ok(Sitemap::Index(locs)),
        Some(other) => Err(Error::parse(format!("sitemap: unexpected root <{other}>"))),
        None => Err(Error::parse("sitemap: no root element")),
    }
}

fn push_piece(locs: &mut Vec<String>, continues: bool, piece: &str) {
    match locs.last_mut() {
        Some(last) if continues => last.push_str(piece),
        _ => locs.push(piece.to_string()),
    }
}

/// Path segment after `/page/`, percent-decoded.
pub fn slug_from_url(url: &str) -> Option<String> {
    let (_, rest) = url.split_once("/page/")?;
    let seg = rest.split(['/', '?', '#']).next()?;
    if seg.is_empty() {
        return None;
    }
    Some(percent_decode_str(seg).decode_utf8_lossy().into_owned())
}
