use std::io::BufRead;

use chrono::{NaiveDate, NaiveDateTime, NaiveTime};
use serde::Serialize;

use super::{normalize_title, Diagnostics, LineOutcome};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RevisionRecord {
    pub title: String,
    pub editor_id: String,
    /// UTC.
    pub timestamp: NaiveDateTime,
    pub is_revert: bool,
}

/// Closed UTC interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Window {
    pub start: NaiveDateTime,
    pub end: NaiveDateTime,
}

impl Window {
    pub fn new(start: NaiveDateTime, end: NaiveDateTime) -> Result<Self> {
        if end < start {
            return Err(Error::invalid(format!("window ends ({end}) before it starts ({start})")));
        }
        Ok(Window { start, end })
    }

    /// Bounds given as timestamps or bare dates; a bare end date covers the
    /// whole day.
    pub fn parse(start: &str, end: &str) -> Result<Self> {
        let bound = |s: &str, end_of_day: bool| -> Result<NaiveDateTime> {
            if let Ok(d) = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d") {
                let t = if end_of_day { NaiveTime::from_hms_nano_opt(23, 59, 59, 999_999_999) } else { NaiveTime::from_hms_opt(0, 0, 0) };
                return Ok(d.and_time(t.expect("valid time")));
            }
            parse_timestamp(s).ok_or_else(|| Error::parse(format!("unparseable window bound {s:?}")))
        };
        Window::new(bound(start, false)?, bound(end, true)?)
    }

    pub fn contains(&self, t: NaiveDateTime) -> bool {
        self.start <= t && t <= self.end
    }
}

/// Accepts `YYYY-MM-DD HH:MM:SS[.f]`, the same with a `T` separator, and an
/// optional trailing `Z`.
pub fn parse_timestamp(s: &str) -> Option<NaiveDateTime> {
    let s = s.trim().trim_end_matches('Z');
    ["%Y-%m-%d %H:%M:%S%.f", "%Y-%m-%dT%H:%M:%S%.f"].iter().find_map(|f| NaiveDateTime::parse_from_str(s, f).ok())
}

/// Zero-based column positions in the mediawiki-history TSV.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HistoryColumns {
    pub event_entity: usize,
    pub event_type: usize,
    pub event_timestamp: usize,
    pub event_user_id: usize,
    pub event_user_text: usize,
    pub page_title: usize,
    pub revision_is_identity_revert: usize,
}

impl Default for HistoryColumns {
    fn default() -> Self {
        HistoryColumns {
            event_entity: 1,
            event_type: 2,
            event_timestamp: 3,
            event_user_id: 5,
            event_user_text: 7,
            page_title: 25,
            revision_is_identity_revert: 67,
        }
    }
}

impl HistoryColumns {
    fn width(&self) -> usize {
        [
            self.event_entity,
            self.event_type,
            self.event_timestamp,
            self.event_user_id,
            self.event_user_text,
            self.page_title,
            self.revision_is_identity_revert,
        ]
        .into_iter()
        .max()
        .unwrap_or(0)
            + 1
    }
}

/// Keeps revision-create events inside `window`. Other event kinds and
/// out-of-window revisions are filtered; short rows, unparseable timestamps
/// or flags, and rows without a title or contributor are malformed.
///
/// The contributor is the user id, or `ip:<text>` for anonymous edits.
pub fn parse_revision_history(reader: impl BufRead, window: Window, columns: &HistoryColumns) -> Result<(Vec<RevisionRecord>, Diagnostics)> {
    let width = columns.width();
    let mut diag = Diagnostics::default();
    let mut records = Vec::new();
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        let outcome = if fields.len() < width {
            LineOutcome::Malformed
        } else if fields[columns.event_entity] != "revision" || fields[columns.event_type] != "create" {
            LineOutcome::Filtered
        } else {
            match parse_row(&fields, columns) {
                None => LineOutcome::Malformed,
                Some(r) if !window.contains(r.timestamp) => LineOutcome::Filtered,
                Some(r) => {
                    records.push(r);
                    LineOutcome::Accepted
                }
            }
        };
        diag.tally(outcome);
    }
    Ok((records, diag))
}

fn parse_row(fields: &[&str], c: &HistoryColumns) -> Option<RevisionRecord> {
    let timestamp = parse_timestamp(fields[c.event_timestamp])?;
    let is_revert = match fields[c.revision_is_identity_revert] {
        "true" => true,
        "false" | "" => false,
        _ => return None,
    };
    let title = normalize_title(fields[c.page_title]);
    let editor_id = match (fields[c.event_user_id].trim(), fields[c.event_user_text].trim()) {
        (id, _) if !id.is_empty() && id != "0" => id.to_string(),
        (_, text) if !text.is_empty() => format!("ip:{text}"),
        _ => return None,
    };
    if title.is_empty() {
        return None;
    }
    Some(RevisionRecord { title, editor_id, timestamp, is_revert })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(ts: &str, user_id: &str, user_text: &str, title: &str, revert: &str) -> String {
        let mut f = vec![""; 70];
        f[0] = "enwiki";
        f[1] = "revision";
        f[2] = "create";
        f[3] = ts;
        f[5] = user_id;
        f[7] = user_text;
        f[25] = title;
        f[67] = revert;
        f.join("\t")
    }

    fn window() -> Window {
        Window::parse("2025-10-27", "2025-11-24").unwrap()
    }

    #[test]
    fn window_filtering_and_reverts() {
        let text = [
            row("2025-10-26 23:59:59.0", "1", "A", "Paris", "false"),
            row("2025-10-27 00:00:00.0", "1", "A", "Paris", "false"),
            row("2025-11-01 12:00:00.0", "", "10.0.0.1", "Dick_Cheney", "true"),
            row("2025-11-24 23:59:59.0", "2", "B", "Paris", "false"),
            row("2025-11-25 00:00:00.0", "2", "B", "Paris", "false"),
        ]
        .join("\n");
        let (recs, diag) = parse_revision_history(text.as_bytes(), window(), &HistoryColumns::default()).unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(diag, Diagnostics { lines: 5, accepted: 3, filtered: 2, malformed: 0 });
        assert_eq!(recs[1].editor_id, "ip:10.0.0.1");
        assert_eq!(recs[1].title, "Dick Cheney");
        assert!(recs[1].is_revert);
        assert!(!recs[0].is_revert);
    }

    #[test]
    fn bad_rows_are_tallied() {
        let mut page_event = row("2025-11-01 00:00:00.0", "1", "A", "Paris", "");
        page_event = page_event.replacen("revision", "page", 1);
        let text = [row("yesterday", "1", "A", "Paris", "false"), "too\tshort".to_string(), page_event].join("\n");
        let (recs, diag) = parse_revision_history(text.as_bytes(), window(), &HistoryColumns::default()).unwrap();
        assert!(recs.is_empty());
        assert_eq!(diag, Diagnostics { lines: 3, accepted: 0, filtered: 1, malformed: 2 });
    }

    #[test]
    fn timestamps() {
        assert!(parse_timestamp("2025-11-01 12:00:00.0").is_some());
        assert!(parse_timestamp("2025-11-01T12:00:00Z").is_some());
        assert!(parse_timestamp("2025-11-01").is_none());
        assert!(Window::parse("2025-11-02", "2025-11-01").is_err());
    }
}
