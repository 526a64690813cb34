use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;

use super::{Polarity, Triplet};
use crate::{Error, Result};

/// Non-blank, non-comment rows of a curation TSV, skipping a header whose
/// first field is `header`.
fn curation_rows(reader: impl BufRead, header: &str, width: usize, file: &str) -> Result<Vec<(usize, Vec<String>)>> {
    let mut rows = Vec::new();
    let mut first = true;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if std::mem::take(&mut first) && fields[0] == header {
            continue;
        }
        if fields.len() != width || fields.iter().any(String::is_empty) {
            return Err(Error::Curation(format!("{file} line {}: expected {width} non-empty fields", idx + 1)));
        }
        rows.push((idx + 1, fields));
    }
    Ok(rows)
}

/// Global mention → canonical name aliases (`aliases.tsv`: alias, canonical).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct AliasMap(BTreeMap<String, String>);

impl AliasMap {
    pub fn load(reader: impl BufRead) -> Result<Self> {
        let mut map = AliasMap::default();
        for (line, f) in curation_rows(reader, "alias", 2, "aliases.tsv")? {
            map.insert(&f[0], &f[1]).map_err(|e| Error::Curation(format!("aliases.tsv line {line}: {e}")))?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, alias: &str, canonical: &str) -> Result<()> {
        match self.0.get(alias) {
            Some(existing) if existing != canonical => {
                Err(Error::Curation(format!("alias {alias:?} maps to both {existing:?} and {canonical:?}")))
            }
            _ => {
                self.0.insert(alias.to_string(), canonical.to_string());
                Ok(())
            }
        }
    }

    pub fn get(&self, alias: &str) -> Option<&str> {
        self.0.get(alias).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Page-scoped aliases (`page_context.tsv`: page, alias, canonical), used to
/// resolve family names shared by several people.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PageContextMap(BTreeMap<(String, String), String>);

impl PageContextMap {
    pub fn load(reader: impl BufRead) -> Result<Self> {
        let mut map = PageContextMap::default();
        for (line, f) in curation_rows(reader, "page", 3, "page_context.tsv")? {
            map.insert(&f[0], &f[1], &f[2]).map_err(|e| Error::Curation(format!("page_context.tsv line {line}: {e}")))?;
        }
        Ok(map)
    }

    pub fn insert(&mut self, page: &str, alias: &str, canonical: &str) -> Result<()> {
        let key = (page.to_string(), alias.to_string());
        match self.0.get(&key) {
            Some(existing) if existing != canonical => Err(Error::Curation(format!(
                "alias {alias:?} on page {page:?} maps to both {existing:?} and {canonical:?}"
            ))),
            _ => {
                self.0.insert(key, canonical.to_string());
                Ok(())
            }
        }
    }

    pub fn get(&self, page: &str, alias: &str) -> Option<&str> {
        self.0.get(&(page.to_string(), alias.to_string())).map(String::as_str)
    }
}

pub const BUNDLED_POLARITY_MAP: &str = include_str!("../../data/polarity_map.tsv");

/// Predicate frame → polarity table (`polarity_map.tsv`: predicate, polarity).
/// Lookups are case-insensitive; unknown predicates are neutral.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PolarityMap(BTreeMap<String, Polarity>);

impl PolarityMap {
    pub fn load(reader: impl BufRead) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (line, f) in curation_rows(reader, "predicate", 2, "polarity_map.tsv")? {
            let polarity: Polarity =
                f[1].parse().map_err(|e| Error::Curation(format!("polarity_map.tsv line {line}: {e}")))?;
            let key = f[0].to_ascii_uppercase();
            if let Some(prev) = map.insert(key.clone(), polarity) {
                if prev != polarity {
                    return Err(Error::Curation(format!("polarity_map.tsv line {line}: {key} listed as {prev} and {polarity}")));
                }
            }
        }
        Ok(PolarityMap(map))
    }

    /// The curated sample shipped with the crate.
    pub fn bundled() -> Self {
        PolarityMap::load(BUNDLED_POLARITY_MAP.as_bytes()).expect("bundled polarity map parses")
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, Polarity)>) -> Self {
        PolarityMap(pairs.into_iter().map(|(k, v)| (k.to_ascii_uppercase(), v)).collect())
    }

    pub fn assign(&self, predicate: &str) -> Polarity {
        self.0.get(&predicate.trim().to_ascii_uppercase()).copied().unwrap_or(Polarity::Neutral)
    }

    /// The same table with supportive and conflictive exchanged.
    pub fn swapped(&self) -> Self {
        PolarityMap(self.0.iter().map(|(k, v)| (k.clone(), v.swapped())).collect())
    }
}

fn canonicalize(mention: &str, page: &str, aliases: &AliasMap, context: &PageContextMap) -> String {
    let mention = mention.trim();
    context
        .get(page, mention)
        .or_else(|| aliases.get(mention))
        .unwrap_or(mention)
        .to_string()
}

/// Page-scoped resolution first, then global aliases; unmapped mentions
/// pass through unchanged.
pub fn normalize_entities(triplets: &[Triplet], aliases: &AliasMap, context: &PageContextMap) -> Vec<Triplet> {
    triplets
        .iter()
        .map(|t| Triplet {
            arg0: canonicalize(&t.arg0, &t.source_page, aliases, context),
            arg1: canonicalize(&t.arg1, &t.source_page, aliases, context),
            ..t.clone()
        })
        .collect()
}

/// Family-name aliases from the titles of person pages. Unique family names
/// become global aliases; family names shared by several people become
/// page-scoped entries on each person's own page and are returned as ambiguous.
pub fn derive_family_aliases(person_titles: &[String]) -> (AliasMap, PageContextMap, BTreeSet<String>) {
    let mut by_family: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for title in person_titles {
        if let Some(family) = title.split_whitespace().last().filter(|f| *f != title.trim()) {
            by_family.entry(family).or_default().insert(title.as_str());
        }
    }
    let mut aliases = AliasMap::default();
    let mut context = PageContextMap::default();
    let mut ambiguous = BTreeSet::new();
    for (family, people) in by_family {
        if people.len() == 1 {
            let person = people.first().expect("non-empty");
            aliases.insert(family, person).expect("fresh alias");
        } else {
            ambiguous.insert(family.to_string());
            for person in people {
                context.insert(person, family, person).expect("fresh page alias");
            }
        }
    }
    (aliases, context, ambiguous)
}
