use std::collections::BTreeMap;
use std::fmt;
use std::io::BufRead;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::Serialize;

use super::{normalize_title, Diagnostics, LineOutcome};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct PageViewRecord {
    pub title: String,
    pub date: NaiveDate,
    pub views: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct YearMonth {
    pub year: i32,
    pub month: u32,
}

impl YearMonth {
    pub fn contains(&self, date: NaiveDate) -> bool {
        date.year() == self.year && date.month() == self.month
    }

    pub fn first_day(&self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month, 1).expect("validated month")
    }

    pub fn days(&self) -> impl Iterator<Item = NaiveDate> + '_ {
        self.first_day().iter_days().take_while(|d| self.contains(*d))
    }
}

impl FromStr for YearMonth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(format!("expected YYYY-MM, got {s:?}"));
        let (y, m) = s.trim().split_once('-').ok_or_else(bad)?;
        let ym = YearMonth { year: y.parse().map_err(|_| bad())?, month: m.parse().map_err(|_| bad())? };
        NaiveDate::from_ymd_opt(ym.year, ym.month, 1).ok_or_else(bad)?;
        Ok(ym)
    }
}

impl fmt::Display for YearMonth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}", self.year, self.month)
    }
}

/// Calendar day encoded in a dump file name such as
/// `pageviews-20251014-user.bz2` or `pageviews-20251014-160000`.
pub fn date_from_filename(name: &str) -> Option<NaiveDate> {
    let bytes = name.as_bytes();
    (0..bytes.len().saturating_sub(7)).find_map(|i| {
        let run = &bytes[i..i + 8];
        let bounded = i == 0 || !bytes[i - 1].is_ascii_digit();
        if bounded && run.iter().all(u8::is_ascii_digit) {
            NaiveDate::parse_from_str(std::str::from_utf8(run).ok()?, "%Y%m%d").ok()
        } else {
            None
        }
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageviewOptions {
    /// Project codes to keep; empty keeps all.
    pub projects: Vec<String>,
    pub month: Option<YearMonth>,
}

impl Default for PageviewOptions {
    fn default() -> Self {
        PageviewOptions { projects: ["en", "en.m", "en.wikipedia"].map(String::from).to_vec(), month: None }
    }
}

/// Parses one day's pageview dump. Recognized line layouts, space-separated:
///
/// * `project title count` (plain per-page counts)
/// * `project title count bytes` (hourly dumps)
/// * `project title page_id access count [hourly]` (daily complete dumps)
///
/// Counts are summed per title. Lines from other projects, or on a day outside
/// `options.month`, are filtered.
pub fn parse_pageviews(reader: impl BufRead, date: NaiveDate, options: &PageviewOptions) -> Result<(Vec<PageViewRecord>, Diagnostics)> {
    let mut diag = Diagnostics::default();
    let mut totals: BTreeMap<String, u64> = BTreeMap::new();
    let in_month = options.month.is_none_or(|m| m.contains(date));
    for line in reader.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let outcome = match parse_line(&line) {
            None => LineOutcome::Malformed,
            Some((project, _, _)) if !options.projects.is_empty() && !options.projects.iter().any(|p| p == project) => {
                LineOutcome::Filtered
            }
            Some(_) if !in_month => LineOutcome::Filtered,
            Some((_, title, count)) => {
                *totals.entry(normalize_title(title)).or_default() += count;
                LineOutcome::Accepted
            }
        };
        diag.tally(outcome);
    }
    let records = totals.into_iter().map(|(title, views)| PageViewRecord { title, date, views }).collect();
    Ok((records, diag))
}

fn parse_line(line: &str) -> Option<(&str, &str, u64)> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    let count = match fields.len() {
        3 | 4 => fields[2],
        5 | 6 => fields[4],
        _ => return None,
    };
    if fields[1].is_empty() || fields[1] == "-" {
        return None;
    }
    Some((fields[0], fields[1], count.parse().ok()?))
}
