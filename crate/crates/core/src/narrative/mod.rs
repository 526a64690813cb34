//! Signed narrative multigraphs built from predicate–agent–target triplets.
//!
//! Triplets come from the extraction adapter as a tab-separated file with a
//! header row and the columns
//! `platform domain page predicate arg0 arg1 arg0_type arg1_type`.

mod curation;
mod graph;
mod metrics;

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use serde::Serialize;

pub use curation::{derive_family_aliases, normalize_entities, AliasMap, PageContextMap, PolarityMap, BUNDLED_POLARITY_MAP};
pub use graph::{
    build_graph, entity_types, role_displacement, sentiment_balance, shared_backbone, top_decile_nodes, BuildReport,
    Displacement, EntityBackbone, MassRanking, NarrativeGraph, SentimentBalance,
};
pub use metrics::{count_cycles, graph_metrics, GraphMetrics, MAX_CYCLE_LENGTH};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Platform {
    /// The human-curated encyclopedia.
    Human,
    /// The generative-mediated counterpart.
    Generative,
}

impl Platform {
    pub const ALL: [Platform; 2] = [Platform::Human, Platform::Generative];

    pub fn as_str(self) -> &'static str {
        match self {
            Platform::Human => "human",
            Platform::Generative => "generative",
        }
    }
}

impl fmt::Display for Platform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Platform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "human" | "wikipedia" | "w" => Ok(Platform::Human),
            "generative" | "grokipedia" | "g" => Ok(Platform::Generative),
            other => Err(Error::parse(format!("unknown platform {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Domain {
    USPolitics,
    Geopolitics,
    Conspiracy,
}

impl Domain {
    pub const ALL: [Domain; 3] = [Domain::USPolitics, Domain::Geopolitics, Domain::Conspiracy];

    pub fn as_str(self) -> &'static str {
        match self {
            Domain::USPolitics => "us_politics",
            Domain::Geopolitics => "geopolitics",
            Domain::Conspiracy => "conspiracy",
        }
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Domain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace([' ', '-', '.'], "_").as_str() {
            "us_politics" | "uspolitics" => Ok(Domain::USPolitics),
            "geopolitics" => Ok(Domain::Geopolitics),
            "conspiracy" => Ok(Domain::Conspiracy),
            other => Err(Error::parse(format!("unknown domain {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Polarity {
    Supportive,
    Conflictive,
    Neutral,
}

impl Polarity {
    pub const ALL: [Polarity; 3] = [Polarity::Supportive, Polarity::Conflictive, Polarity::Neutral];

    pub fn as_str(self) -> &'static str {
        match self {
            Polarity::Supportive => "supportive",
            Polarity::Conflictive => "conflictive",
            Polarity::Neutral => "neutral",
        }
    }

    pub fn swapped(self) -> Polarity {
        match self {
            Polarity::Supportive => Polarity::Conflictive,
            Polarity::Conflictive => Polarity::Supportive,
            Polarity::Neutral => Polarity::Neutral,
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Polarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "supportive" | "support" | "positive" | "+" => Ok(Polarity::Supportive),
            "conflictive" | "conflict" | "negative" | "-" => Ok(Polarity::Conflictive),
            "neutral" | "0" => Ok(Polarity::Neutral),
            other => Err(Error::parse(format!("unknown polarity {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Triplet {
    pub platform: Platform,
    pub domain: Domain,
    pub source_page: String,
    pub predicate: String,
    pub arg0: String,
    pub arg1: String,
    /// Parser-assigned coarse type of this occurrence; may be empty.
    pub arg0_type: String,
    pub arg1_type: String,
}

pub const TRIPLET_HEADER: [&str; 8] =
    ["platform", "domain", "page", "predicate", "arg0", "arg1", "arg0_type", "arg1_type"];

/// Reads a triplet file. The header row is required; blank lines are ignored.
pub fn read_triplets(reader: impl BufRead) -> Result<Vec<Triplet>> {
    let mut lines = reader.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((_, line)) => {
                let line = line?;
                if !line.trim().is_empty() {
                    break line;
                }
            }
            None => return Ok(Vec::new()),
        }
    };
    let columns: Vec<&str> = header.trim_end_matches('\r').split('\t').collect();
    if columns != TRIPLET_HEADER {
        return Err(Error::parse(format!("triplet header mismatch: expected {:?}, got {columns:?}", TRIPLET_HEADER)));
    }
    let mut out = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        if f.len() != TRIPLET_HEADER.len() {
            return Err(Error::parse(format!("triplet line {}: expected 8 fields, got {}", idx + 1, f.len())));
        }
        let t = Triplet {
            platform: f[0].parse()?,
            domain: f[1].parse()?,
            source_page: f[2].to_string(),
            predicate: f[3].trim().to_string(),
            arg0: f[4].trim().to_string(),
            arg1: f[5].trim().to_string(),
            arg0_type: f[6].trim().to_string(),
            arg1_type: f[7].trim().to_string(),
        };
        if t.predicate.is_empty() || t.arg0.is_empty() || t.arg1.is_empty() {
            return Err(Error::parse(format!("triplet line {}: predicate and arguments must be non-empty", idx + 1)));
        }
        out.push(t);
    }
    Ok(out)
}

pub fn write_triplets(mut writer: impl Write, triplets: &[Triplet]) -> Result<()> {
    writeln!(writer, "{}", TRIPLET_HEADER.join("\t"))?;
    for t in triplets {
        writeln!(
            writer,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            t.platform, t.domain, t.source_page, t.predicate, t.arg0, t.arg1, t.arg0_type, t.arg1_type
        )?;
    }
    Ok(())
}
