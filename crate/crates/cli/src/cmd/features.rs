use std::collections::{BTreeMap, BTreeSet};

use chrono::NaiveDate;
use clap::Args;
use encyclodiff::features::{build_page_records, gini_index, RawPage};
use encyclodiff::ingest::{PageStatus, YearMonth};

use super::{month, wiki_universe, StagedPages};
use crate::config::{switch, Settings};
use crate::error::{CliError, Result};
use crate::layout::{producer, Layout};
use crate::table::{flag, num, opt_num, write_table, Table};

pub const HEADER: [&str; 12] = [
    "title",
    "views",
    "references",
    "edits",
    "reverts",
    "views_level",
    "edits_level",
    "references_level",
    "reverts_level",
    "included",
    "rewritten",
    "views_gini",
];

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Month whose daily views make up V and the views Gini (YYYY-MM).
    /// Inferred when the staged pageviews cover a single month.
    #[arg(long)]
    month: Option<String>,
    /// Drop pages without views before discretizing.
    #[arg(long)]
    exclude_zero_views: bool,
}

pub fn run(layout: &Layout, settings: &Settings, args: FeaturesArgs) -> Result<()> {
    let universe = wiki_universe(layout)?;
    let staged = StagedPages::load(layout)?;
    let present = staged.present();

    let pv = Table::read(&layout.output("pageviews.tsv"), producer::INGEST)?;
    let (t_col, d_col, v_col) = (pv.col("title")?, pv.col("date")?, pv.col("views")?);
    let mut daily: BTreeMap<String, BTreeMap<NaiveDate, f64>> = BTreeMap::new();
    for row in &pv.rows {
        let date: NaiveDate = pv.parse(row, d_col)?;
        *daily.entry(row[t_col].to_string()).or_default().entry(date).or_default() += pv.parse::<f64>(row, v_col)?;
    }
    let month = match month(args.month, settings)? {
        Some(m) => m,
        None => infer_month(&daily, &pv.path)?,
    };

    let rev = Table::read(&layout.output("revisions.tsv"), producer::INGEST)?;
    let (rt, rr) = (rev.col("title")?, rev.col("is_revert")?);
    let mut edits: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    for row in &rev.rows {
        let e = edits.entry(row[rt].to_string()).or_default();
        e.0 += 1.0;
        if rev.parse_flag(row, rr)? {
            e.1 += 1.0;
        }
    }

    let raw: Vec<RawPage> = universe
        .iter()
        .map(|(title, &references)| {
            let series: Vec<f64> = month
                .days()
                .map(|d| daily.get(title).and_then(|s| s.get(&d)).copied().unwrap_or(0.0))
                .collect();
            let views: f64 = series.iter().sum();
            let (n_edits, n_reverts) = edits.get(title).copied().unwrap_or_default();
            let status = present.get(title);
            Ok(RawPage {
                title: title.clone(),
                views,
                references: references as f64,
                edits: n_edits,
                reverts: n_reverts,
                included: status.is_some(),
                rewritten: status.map(|s| *s == PageStatus::Rewritten),
                views_gini: (views > 0.0).then(|| gini_index(&series)).transpose()?,
            })
        })
        .collect::<std::result::Result<_, encyclodiff::Error>>()?;

    let records = build_page_records(raw, switch(args.exclude_zero_views, settings.exclude_zero_views))?;
    write_table(
        &layout.output("features.tsv"),
        &HEADER,
        records.iter().map(|r| {
            vec![
                r.title.clone(),
                num(r.views),
                num(r.references),
                num(r.edits),
                num(r.reverts),
                r.levels.views.to_string(),
                r.levels.edits.to_string(),
                r.levels.references.to_string(),
                r.levels.reverts.to_string(),
                flag(r.included),
                r.rewritten.map(flag).unwrap_or_default(),
                opt_num(r.views_gini),
            ]
        }),
    )?;
    eprintln!(
        "features: {} pages for {month}, {} included",
        records.len(),
        records.iter().filter(|r| r.included).count()
    );
    Ok(())
}

fn infer_month(daily: &BTreeMap<String, BTreeMap<NaiveDate, f64>>, path: &std::path::Path) -> Result<YearMonth> {
    use chrono::Datelike;
    let months: BTreeSet<(i32, u32)> = daily.values().flat_map(|s| s.keys()).map(|d| (d.year(), d.month())).collect();
    match months.iter().collect::<Vec<_>>().as_slice() {
        [(year, month)] => Ok(YearMonth { year: *year, month: *month }),
        [] => Err(CliError::input(path, "no pageviews staged; cannot infer --month")),
        _ => Err(CliError::usage(format!("{} covers {} months; pass --month", path.display(), months.len()))),
    }
}
