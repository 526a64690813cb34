use std::collections::BTreeMap;

use encyclodiff::features::ActivityLevel;

use crate::error::Result;
use crate::layout::{producer, Layout};
use crate::table::{num, write_table, Table};

const FACTORS: [&str; 4] = ["views", "edits", "references", "reverts"];
const LEVELS: [ActivityLevel; 4] = [ActivityLevel::Low, ActivityLevel::Mid, ActivityLevel::High, ActivityLevel::VeryHigh];

/// Joins the module outputs into the figure-backing tables under `out/report`.
/// Every input is checked before anything is written.
pub fn run(layout: &Layout) -> Result<()> {
    let features = Table::read(&layout.output("features.tsv"), producer::FEATURES)?;
    let coefficients = [
        ("inclusion", Table::read(&layout.output("coefficients_inclusion.csv"), producer::FIT_INCLUSION)?),
        ("rewrite", Table::read(&layout.output("coefficients_rewrite.csv"), producer::FIT_REWRITE)?),
    ];
    let predictions = [
        ("inclusion", Table::read(&layout.output("predictions_inclusion.csv"), producer::FIT_INCLUSION)?),
        ("rewrite", Table::read(&layout.output("predictions_rewrite.csv"), producer::FIT_REWRITE)?),
    ];
    let fractions = Table::read(&layout.output("editor_fractions.csv"), producer::COMPLEXITY)?;
    let complexity = Table::read(&layout.output("complexity.csv"), producer::COMPLEXITY)?;
    let complexity_summary = Table::read(&layout.output("complexity_summary.csv"), producer::COMPLEXITY)?;
    let displacements = Table::read(&layout.output("displacements.csv"), producer::NARRATIVE)?;
    let framing = Table::read(&layout.output("framing_scores.csv"), producer::FRAMING)?;
    let correlations = Table::read(&layout.output("framing_correlations.csv"), producer::FRAMING)?;

    let mut summary: Vec<Vec<String>> = Vec::new();

    // fig 1
    let mut shares = Vec::new();
    let (included, rewritten) = (features.col("included")?, features.col("rewritten")?);
    for (model, member, positive) in [("inclusion", None, included), ("rewrite", Some(included), rewritten)] {
        for factor in FACTORS {
            let col = features.col(&format!("{factor}_level"))?;
            let mut counts: BTreeMap<ActivityLevel, (usize, usize)> = BTreeMap::new();
            for row in &features.rows {
                if let Some(m) = member {
                    if !features.parse_flag(row, m)? {
                        continue;
                    }
                }
                let c = counts.entry(features.parse(row, col)?).or_default();
                c.0 += 1;
                c.1 += features.parse_flag(row, positive)? as usize;
            }
            for level in LEVELS {
                let (pages, pos) = counts.get(&level).copied().unwrap_or_default();
                let share = if pages == 0 { String::new() } else { num(pos as f64 / pages as f64) };
                shares.push(vec![model.to_string(), factor.to_string(), level.to_string(), pages.to_string(), pos.to_string(), share]);
            }
        }
    }
    write_table(&layout.report("fig1_shares.csv"), &["model", "factor", "level", "pages", "positives", "share"], shares)?;

    let mut coefs = Vec::new();
    for (model, t) in &coefficients {
        let cols = ["label", "estimate", "std_error", "z_value", "p_value"].map(|c| t.col(c)).into_iter().collect::<Result<Vec<_>>>()?;
        for row in &t.rows {
            let mut out = vec![model.to_string()];
            out.extend(cols.iter().map(|&c| row[c].to_string()));
            coefs.push(out);
        }
    }
    write_table(&layout.report("fig1_coefficients.csv"), &["model", "label", "estimate", "std_error", "z_value", "p_value"], coefs)?;
    for (model, t) in &predictions {
        let (scenario, p) = (t.col("scenario")?, t.col("probability")?);
        for row in &t.rows {
            summary.push(vec![format!("p_{model}_{}", &row[scenario]), row[p].to_string()]);
        }
    }

    // fig 2
    let (title, gini) = (features.col("title")?, features.col("views_gini")?);
    let gini_by_title: BTreeMap<&str, &str> = features.rows.iter().map(|r| (&r[title], &r[gini])).collect();
    let (page, platform, fraction) = (fractions.col("page")?, fractions.col("platform")?, fractions.col("fraction")?);
    write_table(
        &layout.report("fig2a_editor_fractions.csv"),
        &["page", "platform", "fraction", "views_gini"],
        fractions.rows.iter().map(|r| {
            vec![r[page].to_string(), r[platform].to_string(), r[fraction].to_string(), gini_by_title.get(&r[page]).copied().unwrap_or("").to_string()]
        }),
    )?;
    let cols = ["page", "complexity_A", "complexity_B", "rank_A", "rank_B", "rank_delta"]
        .map(|c| complexity.col(c))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    write_table(
        &layout.report("fig2b_complexity.csv"),
        &["page", "complexity_A", "complexity_B", "rank_A", "rank_B", "rank_delta"],
        complexity.rows.iter().map(|r| cols.iter().map(|&c| r[c].to_string()).collect::<Vec<_>>()),
    )?;
    let (key, value) = (complexity_summary.col("key")?, complexity_summary.col("value")?);
    for row in &complexity_summary.rows {
        if matches!(&row[key], "pages" | "spearman_rho" | "spearman_p") {
            summary.push(vec![format!("complexity_{}", &row[key]), row[value].to_string()]);
        }
    }

    // fig 3
    let undefined = displacements.col("undefined")?;
    let cols = ["domain", "entity", "displacement_out", "displacement_in", "magnitude"]
        .map(|c| displacements.col(c))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut defined = Vec::new();
    for row in &displacements.rows {
        if !displacements.parse_flag(row, undefined)? {
            defined.push(cols.iter().map(|&c| row[c].to_string()).collect::<Vec<_>>());
        }
    }
    summary.push(vec!["displacements_defined".into(), defined.len().to_string()]);
    summary.push(vec!["displacements_undefined".into(), (displacements.rows.len() - defined.len()).to_string()]);
    write_table(&layout.report("fig3_displacements.csv"), &["domain", "entity", "displacement_out", "displacement_in", "magnitude"], defined)?;

    // fig 4: one row per page scored on both platforms
    let (page, platform) = (framing.col("page")?, framing.col("platform")?);
    let (laud, conf) = (framing.col("laudatory_fraction")?, framing.col("conflict_fraction")?);
    let mut by_page: BTreeMap<&str, [Option<(&str, &str)>; 2]> = BTreeMap::new();
    for row in &framing.rows {
        let slot = (&row[platform] == "generative") as usize;
        by_page.entry(&row[page]).or_default()[slot] = Some((&row[laud], &row[conf]));
    }
    write_table(
        &layout.report("fig4_framing.csv"),
        &["page", "laudatory_human", "laudatory_generative", "conflict_human", "conflict_generative"],
        by_page.iter().filter_map(|(p, [h, g])| {
            let (h, g) = ((*h)?, (*g)?);
            Some(vec![p.to_string(), h.0.to_string(), g.0.to_string(), h.1.to_string(), g.1.to_string()])
        }),
    )?;
    let (dim, rho, p) = (correlations.col("dimension")?, correlations.col("rho")?, correlations.col("p_value")?);
    for row in &correlations.rows {
        summary.push(vec![format!("framing_{}_rho", &row[dim]), row[rho].to_string()]);
        summary.push(vec![format!("framing_{}_p", &row[dim]), row[p].to_string()]);
    }

    write_table(&layout.report("summary.csv"), &["key", "value"], summary)?;
    eprintln!("report: wrote {}", layout.report("").display());
    Ok(())
}
