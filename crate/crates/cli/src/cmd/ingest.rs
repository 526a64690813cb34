use std::collections::{BTreeMap, BTreeSet};
use std::fs::{self, File};
use std::io::BufReader;

use clap::Args;
use encyclodiff::ingest::{
    date_from_filename, match_titles, normalize_title, parse_edit_requests, parse_pageviews, parse_revision_history,
    Diagnostics, HistoryColumns, MatchOptions, PageviewOptions, RawGrokipediaPage,
};

use super::{month, wiki_universe, window};
use crate::config::{switch, Settings};
use crate::error::{CliError, Result};
use crate::layout::{file_name, file_stem, files_with_extension, require, Layout};
use crate::table::{flag, write_table};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Keep only pageviews in this month (YYYY-MM).
    #[arg(long)]
    month: Option<String>,
    /// Analysis window start (date or timestamp, UTC).
    #[arg(long)]
    window_start: Option<String>,
    /// Analysis window end, inclusive.
    #[arg(long)]
    window_end: Option<String>,
    #[arg(long)]
    case_insensitive_match: bool,
}

pub fn run(layout: &Layout, settings: &Settings, args: IngestArgs) -> Result<()> {
    require(&[&layout.wiki_pages(), &layout.grok_pages(), &layout.pageviews(), &layout.history(), &layout.edit_requests()])?;
    let window = window(args.window_start, args.window_end, settings)?;
    let month = month(args.month, settings)?;
    let options = MatchOptions { case_insensitive: switch(args.case_insensitive_match, settings.case_insensitive_match) };

    let universe = wiki_universe(layout)?;
    let by_key: BTreeMap<String, &String> = universe.keys().map(|t| (normalize_title(t), t)).collect();
    let mut diagnostics: Vec<(String, &str, Diagnostics)> = Vec::new();

    // snapshots
    let mut pages = Vec::new();
    let mut errors = Vec::new();
    for path in files_with_extension(&layout.grok_pages(), "html")? {
        let html = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let page = RawGrokipediaPage { slug: file_stem(&path), html, fetched_at: 0 };
        match page.classify() {
            Ok(status) => pages.push((page.slug, status)),
            Err(encyclodiff::Error::MalformedPage { slug, reason }) => errors.push(vec![slug, reason]),
            Err(e) => return Err(e.into()),
        }
    }
    let slugs: BTreeSet<String> = pages.iter().map(|(s, _)| s.clone()).collect();
    let titles: BTreeSet<String> = universe.keys().cloned().collect();
    let report = match_titles(&titles, &slugs, options)?;
    let title_for: BTreeMap<&str, &str> = report.pairings.iter().map(|p| (p.grok_slug.as_str(), p.wiki_title.as_str())).collect();

    write_table(
        &layout.output("pages.tsv"),
        &["slug", "title", "status", "matched"],
        pages.iter().map(|(slug, status)| {
            let title = title_for.get(slug.as_str()).map_or_else(|| normalize_title(slug), |t| t.to_string());
            vec![slug.clone(), title, status.to_string(), flag(title_for.contains_key(slug.as_str()))]
        }),
    )?;
    write_table(
        &layout.output("pairings.tsv"),
        &["wiki_title", "grok_slug", "match_kind"],
        report.pairings.iter().map(|p| vec![p.wiki_title.clone(), p.grok_slug.clone(), p.match_kind.as_str().to_string()]),
    )?;
    write_table(
        &layout.output("unmatched.tsv"),
        &["side", "name"],
        report
            .unmatched_titles
            .iter()
            .map(|t| vec!["wikipedia".to_string(), t.clone()])
            .chain(report.unmatched_slugs.iter().map(|s| vec!["grokipedia".to_string(), s.clone()])),
    )?;
    write_table(&layout.output("ingest_errors.tsv"), &["slug", "reason"], errors)?;

    // pageviews, summed across files of the same day
    let pv_options = PageviewOptions { month, ..Default::default() };
    let mut views: BTreeMap<(&String, chrono::NaiveDate), u64> = BTreeMap::new();
    for path in files_with_extension(&layout.pageviews(), "txt")? {
        let name = file_name(&path);
        let date = date_from_filename(&name).ok_or_else(|| CliError::input(&path, "no YYYYMMDD date in file name"))?;
        let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
        let (records, diag) = parse_pageviews(BufReader::new(file), date, &pv_options)?;
        for r in records {
            if let Some(title) = by_key.get(&r.title) {
                *views.entry((title, r.date)).or_default() += r.views;
            }
        }
        diagnostics.push((name, "pageviews", diag));
    }
    write_table(
        &layout.output("pageviews.tsv"),
        &["title", "date", "views"],
        views.iter().map(|((title, date), v)| vec![title.to_string(), date.to_string(), v.to_string()]),
    )?;

    // revisions
    let mut revisions = Vec::new();
    for path in files_with_extension(&layout.history(), "tsv")? {
        let file = File::open(&path).map_err(|e| CliError::io(&path, e))?;
        let (records, diag) = parse_revision_history(BufReader::new(file), window, &HistoryColumns::default())?;
        revisions.extend(records.into_iter().filter_map(|mut r| {
            r.title = by_key.get(&r.title)?.to_string();
            Some(r)
        }));
        diagnostics.push((file_name(&path), "revisions", diag));
    }
    revisions.sort();
    write_table(
        &layout.output("revisions.tsv"),
        &["title", "editor_id", "timestamp", "is_revert"],
        revisions.iter().map(|r| {
            vec![r.title.clone(), r.editor_id.clone(), r.timestamp.format("%Y-%m-%d %H:%M:%S").to_string(), flag(r.is_revert)]
        }),
    )?;

    // edit requests
    let mut edits = Vec::new();
    for path in files_with_extension(&layout.edit_requests(), "json")? {
        let payload = fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let requests = parse_edit_requests(&payload).map_err(|e| CliError::input(&path, e.to_string()))?;
        let mut diag = Diagnostics::default();
        for r in requests {
            diag.lines += 1;
            if window.contains(r.created_at.naive_utc()) {
                diag.accepted += 1;
                edits.push(r);
            } else {
                diag.filtered += 1;
            }
        }
        diagnostics.push((file_name(&path), "edit_requests", diag));
    }
    edits.sort();
    write_table(
        &layout.output("edits.tsv"),
        &["slug", "author_id", "created_at", "status"],
        edits.iter().map(|r| {
            vec![
                r.slug.clone(),
                r.author_id.clone(),
                r.created_at.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
                r.status.clone().unwrap_or_default(),
            ]
        }),
    )?;

    write_table(
        &layout.output("ingest_diagnostics.tsv"),
        &["source", "kind", "lines", "accepted", "filtered", "malformed"],
        diagnostics.iter().map(|(source, kind, d)| {
            vec![
                source.clone(),
                kind.to_string(),
                d.lines.to_string(),
                d.accepted.to_string(),
                d.filtered.to_string(),
                d.malformed.to_string(),
            ]
        }),
    )?;
    eprintln!(
        "ingest: {} snapshots ({} paired), {} pageview rows, {} revisions, {} edit requests",
        pages.len(),
        report.pairings.len(),
        views.len(),
        revisions.len(),
        edits.len()
    );
    Ok(())
}
