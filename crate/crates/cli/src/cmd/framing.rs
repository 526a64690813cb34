use std::collections::BTreeMap;
use std::fs;
use std::time::Duration;

use clap::Args;
use encyclodiff::framing::{
    annotate_sentences, extract_lead, framing_score, AnnotatorConfig, FramingScore, HeadingStyle, HttpBackend, RuleSplitter,
    SentenceSplitter, WireFormat, DEFAULT_MIN_CHARS, DEFAULT_MODEL,
};
use encyclodiff::narrative::Platform;
use encyclodiff::stats::spearman;

use crate::config::{pick, Settings};
use crate::error::{CliError, Result};
use crate::layout::{require, Layout};
use crate::table::{num, write_table, Table};

pub const DEFAULT_ENDPOINT: &str = "http://localhost:11434";

#[derive(Debug, Args)]
pub struct FramingArgs {
    /// Base URL of the chat endpoint.
    #[arg(long)]
    endpoint: Option<String>,
    /// `ollama` or `openai` request shape.
    #[arg(long)]
    wire: Option<String>,
    #[arg(long)]
    model: Option<String>,
    /// Attempts per sentence before it is left unscored.
    #[arg(long)]
    attempts: Option<usize>,
    /// Requests in flight at once.
    #[arg(long)]
    concurrency: Option<usize>,
    /// Per-sentence response cache; defaults to <out>/framing_cache.
    #[arg(long)]
    cache_dir: Option<std::path::PathBuf>,
    #[arg(long)]
    min_chars: Option<usize>,
    #[arg(long)]
    timeout_secs: Option<u64>,
}

struct Article {
    page: String,
    platform: Platform,
    style: HeadingStyle,
    path: std::path::PathBuf,
}

fn manifest(layout: &Layout) -> Result<Vec<Article>> {
    let t = Table::read_input(&layout.framing_manifest())?;
    let (page, platform, style, path) = (t.col("page")?, t.col("platform")?, t.col("style")?, t.col("path")?);
    let base = layout.framing_manifest().parent().map(|p| p.to_path_buf()).unwrap_or_default();
    let mut out = Vec::new();
    for row in &t.rows {
        let bad = |e: encyclodiff::Error| CliError::input(&t.path, e.to_string());
        out.push(Article {
            page: row[page].to_string(),
            platform: row[platform].parse().map_err(bad)?,
            style: HeadingStyle::parse(&row[style]).map_err(bad)?,
            path: base.join(&row[path]),
        });
    }
    Ok(out)
}

pub fn run(layout: &Layout, settings: &Settings, args: FramingArgs) -> Result<()> {
    let min_chars = pick(args.min_chars, settings.min_chars, DEFAULT_MIN_CHARS);
    let wire = WireFormat::parse(&pick(args.wire, settings.wire.clone(), "ollama".to_string())).map_err(|e| CliError::usage(e.to_string()))?;
    let endpoint = pick(args.endpoint, settings.endpoint.clone(), DEFAULT_ENDPOINT.to_string());
    let timeout = Duration::from_secs(pick(args.timeout_secs, settings.timeout_secs, 120));
    let config = AnnotatorConfig {
        model: pick(args.model, settings.model.clone(), DEFAULT_MODEL.to_string()),
        attempts: pick(args.attempts, settings.attempts, 3),
        concurrency: pick(args.concurrency, settings.concurrency, 4),
        cache_dir: Some(pick(args.cache_dir, settings.cache_dir.clone(), layout.output("framing_cache"))),
    };
    let splitter = RuleSplitter::default();

    require(&[&layout.framing_manifest()])?;
    let articles = manifest(layout)?;
    require(&articles.iter().map(|a| a.path.as_path()).collect::<Vec<_>>())?;

    let mut excluded = Vec::new();
    let mut batches = Vec::new();
    for a in &articles {
        let text = fs::read_to_string(&a.path).map_err(|e| CliError::io(&a.path, e))?;
        let lead = extract_lead(&a.page, a.platform, &text, a.style)?;
        let sentences = if lead.is_eligible(min_chars) { splitter.split(&lead.text) } else { Vec::new() };
        batches.push((lead, sentences));
    }

    let all: Vec<String> = batches.iter().flat_map(|(_, s)| s.iter().cloned()).collect();
    let backend = HttpBackend::new(&endpoint, wire, timeout);
    let annotations = annotate_sentences(&backend, &config, &all)?;

    let mut scores: Vec<FramingScore> = Vec::new();
    let mut offset = 0;
    for (lead, sentences) in &batches {
        let slice = &annotations[offset..offset + sentences.len()];
        offset += sentences.len();
        match framing_score(slice, lead, min_chars) {
            Ok(s) => scores.push(s),
            Err(reason) => excluded.push(vec![lead.title.clone(), lead.platform.to_string(), reason.to_string()]),
        }
    }
    scores.sort_by(|a, b| (&a.page, a.platform).cmp(&(&b.page, b.platform)));
    excluded.sort();

    write_table(
        &layout.output("framing_scores.csv"),
        &["page", "platform", "laudatory_fraction", "conflict_fraction", "n_sentences", "n_unscored"],
        scores.iter().map(|s| {
            vec![
                s.page.clone(),
                s.platform.to_string(),
                num(s.laudatory_fraction),
                num(s.conflict_fraction),
                s.n_sentences.to_string(),
                s.n_unscored.to_string(),
            ]
        }),
    )?;
    write_table(&layout.output("framing_excluded.csv"), &["page", "platform", "reason"], excluded)?;

    // per dimension, pages scored on both platforms
    let mut paired: BTreeMap<&str, [Option<&FramingScore>; 2]> = BTreeMap::new();
    for s in &scores {
        paired.entry(&s.page).or_default()[(s.platform == Platform::Generative) as usize] = Some(s);
    }
    let both: Vec<(&FramingScore, &FramingScore)> = paired.values().filter_map(|[h, g]| Some(((*h)?, (*g)?))).collect();
    let mut correlations = Vec::new();
    for (dimension, get) in [
        ("laudatory", (|s: &FramingScore| s.laudatory_fraction) as fn(&FramingScore) -> f64),
        ("conflict", |s| s.conflict_fraction),
    ] {
        let xs: Vec<f64> = both.iter().map(|(h, _)| get(h)).collect();
        let ys: Vec<f64> = both.iter().map(|(_, g)| get(g)).collect();
        correlations.push(match spearman(&xs, &ys) {
            Ok(r) => vec![dimension.to_string(), both.len().to_string(), num(r.rho), num(r.p_value), String::new()],
            Err(e) => vec![dimension.to_string(), both.len().to_string(), String::new(), String::new(), e.to_string()],
        });
    }
    write_table(&layout.output("framing_correlations.csv"), &["dimension", "n", "rho", "p_value", "note"], correlations)?;
    eprintln!("framing: {} sentences, {} pages scored, {} pairs", all.len(), scores.len(), both.len());
    Ok(())
}
