//! `encyclodiff`: file-staged pipeline comparing a human-curated
//! encyclopedia with its generative counterpart.

mod cmd;
mod config;
mod error;
mod layout;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{pick, Settings};
use error::Result;
use layout::Layout;

#[derive(Debug, Parser)]
#[command(name = "encyclodiff", version, about = "Compare a human-curated encyclopedia with its generative counterpart")]
struct Cli {
    /// TOML key-value file; keys mirror long flags with underscores.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Input data directory.
    #[arg(long, global = true)]
    data: Option<PathBuf>,

    /// Output directory for staged artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Walk a sitemap and download page snapshots (and edit requests).
    Fetch(cmd::fetch::FetchArgs),
    /// Parse snapshots and dumps; match pages across platforms.
    Ingest(cmd::ingest::IngestArgs),
    /// Aggregate activity counts and discretize them into levels.
    Features(cmd::features::FeaturesArgs),
    /// Fit the inclusion model on features.tsv.
    FitInclusion(FitArgs),
    /// Fit the rewrite model on the included pages of features.tsv.
    FitRewrite(FitArgs),
    /// Editor-page fitness and complexity on both platforms.
    Complexity(cmd::complexity::ComplexityArgs),
    /// Narrative multigraphs, sentiment balances and displacements.
    Narrative(cmd::narrative::NarrativeArgs),
    /// Lead-section framing scores through a chat endpoint.
    Framing(cmd::framing::FramingArgs),
    /// Join module outputs into figure-backing tables.
    Report,
    /// Write a seeded synthetic input corpus into --out.
    Synth(cmd::synth::SynthArgs),
}

#[derive(Debug, Args)]
struct FitArgs {
    #[command(flatten)]
    fit: cmd::fit::FitFlags,
}

fn run(cli: Cli) -> Result<()> {
    let settings = match &cli.config {
        Some(path) => Settings::load(path)?,
        None => Settings::default(),
    };
    let layout = Layout {
        data: pick(cli.data, settings.data.clone(), PathBuf::from("data")),
        out: pick(cli.out, settings.out.clone(), PathBuf::from("out")),
    };
    match cli.command {
        Command::Fetch(args) => cmd::fetch::run(&layout, &settings, args),
        Command::Ingest(args) => cmd::ingest::run(&layout, &settings, args),
        Command::Features(args) => cmd::features::run(&layout, &settings, args),
        Command::FitInclusion(args) => cmd::fit::run(&layout, &settings, cmd::fit::Model::Inclusion, args.fit),
        Command::FitRewrite(args) => cmd::fit::run(&layout, &settings, cmd::fit::Model::Rewrite, args.fit),
        Command::Complexity(args) => cmd::complexity::run(&layout, &settings, args),
        Command::Narrative(args) => cmd::narrative::run(&layout, &settings, args),
        Command::Framing(args) => cmd::framing::run(&layout, &settings, args),
        Command::Report => cmd::report::run(&layout),
        Command::Synth(args) => cmd::synth::run(&layout, &settings, args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(1);
        }
        Err(e) => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
