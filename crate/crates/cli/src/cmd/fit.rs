use clap::Args;
use encyclodiff::features::{ActivityLevel, FactorLevels};
use encyclodiff::glm::{encode_levels, fit_logistic, predict_probability, FitOptions, InteractionEncoding};
use encyclodiff::Error;

use crate::config::{pick, Settings};
use crate::error::{CliError, Result};
use crate::layout::{producer, Layout};
use crate::table::{flag, num, write_table, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Model {
    Inclusion,
    Rewrite,
}

impl Model {
    fn name(self) -> &'static str {
        match self {
            Model::Inclusion => "inclusion",
            Model::Rewrite => "rewrite",
        }
    }
}

#[derive(Debug, Args)]
pub struct FitFlags {
    /// Ridge-stabilize non-intercept columns; bare flag uses 1e-6.
    #[arg(long, num_args = 0..=1, default_missing_value = "1e-6")]
    ridge: Option<f64>,
    /// Edits x reverts encoding: `score` (one product column) or `full`.
    #[arg(long)]
    interaction: Option<String>,
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    max_iterations: Option<usize>,
}

pub fn parse_interaction(s: &str) -> Result<InteractionEncoding> {
    match s {
        "score" => Ok(InteractionEncoding::ScoreProduct),
        "full" => Ok(InteractionEncoding::Full),
        other => Err(CliError::usage(format!("--interaction must be score or full, got {other:?}"))),
    }
}

/// Named level profiles with every factor Low except the ones listed.
fn scenarios() -> Vec<(String, FactorLevels)> {
    let low = FactorLevels::all(ActivityLevel::Low);
    let mut out = vec![("all_low".to_string(), low)];
    for (name, set) in [
        ("views", (|l: &mut FactorLevels| l.views = ActivityLevel::VeryHigh) as fn(&mut FactorLevels)),
        ("edits", |l| l.edits = ActivityLevel::VeryHigh),
        ("references", |l| l.references = ActivityLevel::VeryHigh),
        ("reverts", |l| l.reverts = ActivityLevel::VeryHigh),
    ] {
        let mut l = low;
        set(&mut l);
        out.push((format!("{name}_veryhigh"), l));
    }
    out.push(("all_veryhigh".to_string(), FactorLevels::all(ActivityLevel::VeryHigh)));
    out
}

pub fn run(layout: &Layout, settings: &Settings, model: Model, flags: FitFlags) -> Result<()> {
    let encoding = parse_interaction(&pick(flags.interaction, settings.interaction.clone(), "score".to_string()))?;
    let t = Table::read(&layout.output("features.tsv"), producer::FEATURES)?;
    let cols = ["views_level", "edits_level", "references_level", "reverts_level", "included", "rewritten"]
        .map(|c| t.col(c))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut levels = Vec::new();
    let mut outcome = Vec::new();
    for row in &t.rows {
        let y = match model {
            Model::Inclusion => t.parse_flag(row, cols[4])?,
            Model::Rewrite => {
                if !t.parse_flag(row, cols[4])? {
                    continue;
                }
                t.parse_flag(row, cols[5])?
            }
        };
        levels.push(FactorLevels {
            views: t.parse(row, cols[0])?,
            edits: t.parse(row, cols[1])?,
            references: t.parse(row, cols[2])?,
            reverts: t.parse(row, cols[3])?,
        });
        outcome.push(y);
    }

    let defaults = FitOptions::default();
    let options = FitOptions {
        tolerance: pick(flags.tolerance, settings.tolerance, defaults.tolerance),
        max_iterations: pick(flags.max_iterations, settings.max_iterations, defaults.max_iterations),
        ridge: flags.ridge.or(settings.ridge),
    };
    let design = encode_levels(&levels, encoding)?;
    let fit = fit_logistic(&design, &outcome, &options).map_err(|e| match e {
        Error::Separation { .. } => CliError::Core(Error::Degenerate(format!("{e}; rerun with --ridge"))),
        other => CliError::Core(other),
    })?;

    let name = model.name();
    write_table(
        &layout.output(&format!("coefficients_{name}.csv")),
        &["label", "estimate", "std_error", "z_value", "p_value"],
        fit.coefficients.iter().map(|c| vec![c.label.clone(), num(c.estimate), num(c.standard_error), num(c.z_value), num(c.p_value)]),
    )?;

    let positives = outcome.iter().filter(|&&y| y).count();
    let mut meta = vec![
        vec!["model".to_string(), name.to_string()],
        vec!["rows".to_string(), outcome.len().to_string()],
        vec!["positives".to_string(), positives.to_string()],
        vec!["interaction".to_string(), if encoding == InteractionEncoding::Full { "full" } else { "score" }.to_string()],
        vec!["ridge".to_string(), options.ridge.map(num).unwrap_or_default()],
        vec!["iterations".to_string(), fit.iterations.to_string()],
        vec!["converged".to_string(), flag(fit.converged)],
        vec!["log_likelihood".to_string(), num(fit.log_likelihood)],
    ];
    meta.extend(fit.notes.iter().map(|n| vec!["note".to_string(), n.clone()]));
    write_table(&layout.output(&format!("fit_{name}.csv")), &["key", "value"], meta)?;

    write_table(
        &layout.output(&format!("predictions_{name}.csv")),
        &["scenario", "probability", "note"],
        scenarios().into_iter().map(|(scenario, l)| match predict_probability(&fit, &l) {
            Ok(p) => vec![scenario, num(p), String::new()],
            Err(e) => vec![scenario, String::new(), e.to_string()],
        }),
    )?;
    eprintln!(
        "fit-{name}: {} rows, {positives} positive, {} iterations, converged={}",
        outcome.len(),
        fit.iterations,
        fit.converged
    );
    Ok(())
}
