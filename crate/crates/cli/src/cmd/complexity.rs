use std::collections::{BTreeMap, BTreeSet};

use clap::Args;
use encyclodiff::complexity::{
    build_platform_pair, fitness_complexity, rank_delta, BipartiteMatrix, EditEvent, FitnessComplexityResult,
    DEFAULT_MAX_ITERATIONS, DEFAULT_TOLERANCE,
};
use encyclodiff::features::editor_fraction;
use encyclodiff::stats::spearman;

use super::StagedPages;
use crate::config::{pick, switch, Settings};
use crate::error::{CliError, Result};
use crate::layout::{producer, Layout};
use crate::table::{flag, num, write_table, Table};

/// Edit-request statuses counted under `--accepted-only`.
pub const ACCEPTED_STATUSES: [&str; 4] = ["accepted", "approved", "applied", "implemented"];

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// Platform ranked as A: grokipedia or wikipedia.
    #[arg(long)]
    platform_a: Option<String>,
    #[arg(long)]
    platform_b: Option<String>,
    /// Minimum edits on each platform for a page to enter the matrices.
    #[arg(long)]
    min_edits: Option<usize>,
    /// Count only accepted edit requests on the generative platform.
    #[arg(long)]
    accepted_only: bool,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

pub fn run(layout: &Layout, settings: &Settings, args: ComplexityArgs) -> Result<()> {
    let name_a = pick(args.platform_a, settings.platform_a.clone(), "grokipedia".to_string());
    let name_b = pick(args.platform_b, settings.platform_b.clone(), "wikipedia".to_string());
    if name_a == name_b {
        return Err(CliError::usage("--platform-a and --platform-b must differ"));
    }
    for name in [&name_a, &name_b] {
        if !matches!(name.as_str(), "grokipedia" | "wikipedia") {
            return Err(CliError::usage(format!("unknown platform {name:?}; expected grokipedia or wikipedia")));
        }
    }
    let staged = StagedPages::load(layout)?;
    let present = staged.present();
    let accepted_only = switch(args.accepted_only, settings.accepted_only);

    let edits = Table::read(&layout.output("edits.tsv"), producer::INGEST)?;
    let (slug, author, status) = (edits.col("slug")?, edits.col("author_id")?, edits.col("status")?);
    let grok: Vec<EditEvent> = edits
        .rows
        .iter()
        .filter(|r| !accepted_only || ACCEPTED_STATUSES.contains(&r[status].to_ascii_lowercase().as_str()))
        .filter_map(|r| {
            let title = staged.wiki_for_slug.get(&r[slug])?;
            present.contains_key(title).then(|| EditEvent::new(title.clone(), &r[author]))
        })
        .collect();

    let revs = Table::read(&layout.output("revisions.tsv"), producer::INGEST)?;
    let (title, editor) = (revs.col("title")?, revs.col("editor_id")?);
    let wiki: Vec<EditEvent> = revs.rows.iter().map(|r| EditEvent::new(&r[title], &r[editor])).collect();

    let mut platforms = BTreeMap::from([("grokipedia", grok), ("wikipedia", wiki)]);
    let events_a = platforms.remove(name_a.as_str()).unwrap_or_default();
    let events_b = platforms.remove(name_b.as_str()).unwrap_or_default();

    write_editor_fractions(layout, &present.keys().cloned().collect(), [(&name_a, &events_a), (&name_b, &events_b)])?;

    let paired: BTreeSet<String> = present.keys().cloned().collect();
    let min_edits = pick(args.min_edits, settings.min_edits, 2);
    let (m_a, m_b) = build_platform_pair(&events_a, &events_b, &paired, min_edits)?;
    let tol = pick(args.tolerance, settings.tolerance, DEFAULT_TOLERANCE);
    let max_iter = pick(args.max_iterations, settings.max_iterations, DEFAULT_MAX_ITERATIONS);
    let fc_a = fitness_complexity(&m_a, tol, max_iter)?;
    let fc_b = fitness_complexity(&m_b, tol, max_iter)?;
    let q_a = fc_a.complexity_by_page(&m_a);
    let q_b = fc_b.complexity_by_page(&m_b);
    let deltas = rank_delta(&q_a, &q_b)?;

    write_table(
        &layout.output("complexity.csv"),
        &["page", "complexity_A", "complexity_B", "rank_A", "rank_B", "rank_delta"],
        deltas.iter().map(|d| vec![d.page.clone(), num(q_a[&d.page]), num(q_b[&d.page]), num(d.rank_a), num(d.rank_b), num(d.delta)]),
    )?;
    write_table(
        &layout.output("fitness.csv"),
        &["platform", "editor", "fitness"],
        fitness_rows(&name_a, &m_a, &fc_a).chain(fitness_rows(&name_b, &m_b, &fc_b)),
    )?;

    let xs: Vec<f64> = q_a.values().copied().collect();
    let ys: Vec<f64> = q_b.values().copied().collect();
    let (rho, p) = match spearman(&xs, &ys) {
        Ok(r) => (num(r.rho), num(r.p_value)),
        Err(e) => {
            eprintln!("complexity: no rank correlation: {e}");
            (String::new(), String::new())
        }
    };
    let summary = vec![
        vec!["platform_A".to_string(), name_a.clone()],
        vec!["platform_B".to_string(), name_b.clone()],
        vec!["min_edits".to_string(), min_edits.to_string()],
        vec!["pages".to_string(), deltas.len().to_string()],
        vec!["editors_A".to_string(), m_a.editors().len().to_string()],
        vec!["editors_B".to_string(), m_b.editors().len().to_string()],
        vec!["iterations_A".to_string(), fc_a.iterations.to_string()],
        vec!["iterations_B".to_string(), fc_b.iterations.to_string()],
        vec!["converged_A".to_string(), flag(fc_a.converged)],
        vec!["converged_B".to_string(), flag(fc_b.converged)],
        vec!["spearman_rho".to_string(), rho],
        vec!["spearman_p".to_string(), p],
    ];
    write_table(&layout.output("complexity_summary.csv"), &["key", "value"], summary)?;
    eprintln!("complexity: {} pages on both platforms", deltas.len());
    Ok(())
}

fn fitness_rows<'a>(platform: &'a str, m: &'a BipartiteMatrix, fc: &'a FitnessComplexityResult) -> impl Iterator<Item = Vec<String>> + 'a {
    m.editors().iter().zip(&fc.fitness).map(move |(e, f)| vec![platform.to_string(), e.clone(), num(*f)])
}

/// Share of each platform's editors who touched each paired page.
fn write_editor_fractions(layout: &Layout, pages: &BTreeSet<String>, platforms: [(&String, &Vec<EditEvent>); 2]) -> Result<()> {
    let mut rows = Vec::new();
    for (name, events) in platforms {
        let everyone: BTreeSet<&str> = events.iter().map(|e| e.editor.as_str()).collect();
        let mut by_page: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
        for e in events {
            by_page.entry(e.page.as_str()).or_default().insert(e.editor.as_str());
        }
        for page in pages {
            let editors = by_page.get(page.as_str()).cloned().unwrap_or_default();
            let fraction = if everyone.is_empty() { None } else { Some(editor_fraction(editors.iter(), everyone.len())?) };
            rows.push(vec![
                page.clone(),
                name.clone(),
                editors.len().to_string(),
                everyone.len().to_string(),
                fraction.map(num).unwrap_or_default(),
            ]);
        }
    }
    rows.sort();
    write_table(&layout.output("editor_fractions.csv"), &["page", "platform", "editors", "platform_editors", "fraction"], rows)
}
