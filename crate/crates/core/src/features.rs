//! Ordinal activity levels and concentration statistics.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ActivityLevel {
    Low,
    Mid,
    High,
    VeryHigh,
}

impl ActivityLevel {
    pub const ALL: [ActivityLevel; 4] = [Self::Low, Self::Mid, Self::High, Self::VeryHigh];

    /// Integer score used by the ordinal interaction encoding (Low = 0).
    pub fn score(self) -> u8 {
        self as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Low => "Low",
            Self::Mid => "Mid",
            Self::High => "High",
            Self::VeryHigh => "VeryHigh",
        }
    }
}

impl fmt::Display for ActivityLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ActivityLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "Low" => Ok(Self::Low),
            "Mid" => Ok(Self::Mid),
            "High" => Ok(Self::High),
            "VeryHigh" => Ok(Self::VeryHigh),
            other => Err(Error::parse(format!("unknown activity level {other:?}"))),
        }
    }
}

/// The four discretized page features, in the order views, edits, references, reverts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FactorLevels {
    pub views: ActivityLevel,
    pub edits: ActivityLevel,
    pub references: ActivityLevel,
    pub reverts: ActivityLevel,
}

impl FactorLevels {
    pub fn all(level: ActivityLevel) -> Self {
        FactorLevels { views: level, edits: level, references: level, reverts: level }
    }
}

/// One Wikipedia page with its raw activity counts, levels and outcomes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRecord {
    pub title: String,
    pub views: f64,
    pub references: f64,
    pub edits: f64,
    pub reverts: f64,
    pub levels: FactorLevels,
    /// Present on the generative platform.
    pub included: bool,
    /// Rewritten rather than reproduced verbatim; `None` unless `included`.
    pub rewritten: Option<bool>,
    /// Concentration of daily views over the month; `None` when the page had no views.
    pub views_gini: Option<f64>,
}

/// Raw counts for one page before corpus-wide discretization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPage {
    pub title: String,
    pub views: f64,
    pub references: f64,
    pub edits: f64,
    pub reverts: f64,
    pub included: bool,
    pub rewritten: Option<bool>,
    pub views_gini: Option<f64>,
}

/// Iterative mean-based discretization into four ordinal levels.
///
/// At step k the mean of the not-yet-assigned values is computed and every
/// value strictly below it takes the k-th level. Values that survive three
/// steps are `VeryHigh`. A value equal to the running mean survives to the
/// next step.
pub fn discretize_iterative_mean(values: &[f64]) -> Result<Vec<ActivityLevel>> {
    if values.is_empty() {
        return Err(Error::invalid("cannot discretize an empty list"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
        return Err(Error::invalid(format!(
            "discretization requires finite non-negative values, got {bad}"
        )));
    }

    let mut levels = vec![ActivityLevel::VeryHigh; values.len()];
    let mut remaining: Vec<usize> = (0..values.len()).collect();
    for level in [ActivityLevel::Low, ActivityLevel::Mid, ActivityLevel::High] {
        if remaining.is_empty() {
            break;
        }
        let threshold = mean_of(remaining.iter().map(|&i| values[i]));
        remaining.retain(|&i| {
            if values[i] < threshold {
                levels[i] = level;
                false
            } else {
                true
            }
        });
    }
    Ok(levels)
}

/// Mean with compensated summation. Returns the common value exactly when
/// all inputs are equal, so ties at the mean are never split by rounding.
fn mean_of(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let mut first = None;
    let mut all_equal = true;
    let mut sum = 0.0_f64;
    let mut compensation = 0.0_f64;
    let mut n = 0usize;
    for v in values {
        match first {
            None => first = Some(v),
            Some(f) if f != v => all_equal = false,
            _ => {}
        }
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
        n += 1;
    }
    match first {
        Some(f) if all_equal => f,
        _ => (sum + compensation) / n as f64,
    }
}

/// Mean-absolute-difference Gini index, Σᵢⱼ|xᵢ − xⱼ| / (2 n² x̄), without
/// small-sample correction.
pub fn gini_index(values: &[f64]) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::invalid("gini of an empty list"));
    }
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(Error::invalid("gini requires finite non-negative values"));
    }
    let total: f64 = values.iter().sum();
    if total <= 0.0 {
        return Err(Error::Degenerate("gini undefined for all-zero input".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    // Σᵢⱼ|xᵢ − xⱼ| = 2 Σᵢ (2i − n − 1) x₍ᵢ₎ with 1-based ranks over the sorted sample.
    let weighted: f64 = sorted
        .iter()
        .enumerate()
        .map(|(i, x)| (2.0 * (i as f64 + 1.0) - n - 1.0) * x)
        .sum();
    let mean = total / n;
    Ok((2.0 * weighted / (2.0 * n * n * mean)).max(0.0))
}

/// Share of a platform's editors who edited the page at least once.
pub fn editor_fraction<T: Eq + Hash>(
    page_editors: impl IntoIterator<Item = T>,
    platform_editors: usize,
) -> Result<f64> {
    if platform_editors == 0 {
        return Err(Error::invalid("platform has no editors"));
    }
    let distinct: HashSet<T> = page_editors.into_iter().collect();
    if distinct.len() > platform_editors {
        return Err(Error::invalid(format!(
            "page has {} editors but the platform only {platform_editors}",
            distinct.len()
        )));
    }
    Ok(distinct.len() as f64 / platform_editors as f64)
}

/// Discretizes each raw feature over the whole corpus and attaches the levels.
///
/// With `exclude_zero_views`, pages without views are dropped before
/// discretization.
pub fn build_page_records(raw: Vec<RawPage>, exclude_zero_views: bool) -> Result<Vec<PageRecord>> {
    let raw: Vec<RawPage> = if exclude_zero_views {
        raw.into_iter().filter(|p| p.views > 0.0).collect()
    } else {
        raw
    };
    if let Some(p) = raw.iter().find(|p| p.rewritten.is_some() && !p.included) {
        return Err(Error::invalid(format!(
            "page {:?} has a rewrite outcome but is not included",
            p.title
        )));
    }
    let column = |f: fn(&RawPage) -> f64| -> Result<Vec<ActivityLevel>> {
        discretize_iterative_mean(&raw.iter().map(f).collect::<Vec<_>>())
    };
    let views = column(|p| p.views)?;
    let edits = column(|p| p.edits)?;
    let references = column(|p| p.references)?;
    let reverts = column(|p| p.reverts)?;

    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(i, p)| PageRecord {
            title: p.title,
            views: p.views,
            references: p.references,
            edits: p.edits,
            reverts: p.reverts,
            levels: FactorLevels {
                views: views[i],
                edits: edits[i],
                references: references[i],
                reverts: reverts[i],
            },
            included: p.included,
            rewritten: p.rewritten,
            views_gini: p.views_gini,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::ActivityLevel::*;
    use super::*;

    #[test]
    fn all_equal_values_are_very_high() {
        for c in [0.0, 0.1, 7.0, 1e300] {
            assert_eq!(discretize_iterative_mean(&[c, c, c]).unwrap(), vec![VeryHigh; 3]);
        }
    }

    #[test]
    fn ten_value_example() {
        let values = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 40.0, 100.0];
        let levels = discretize_iterative_mean(&values).unwrap();
        assert_eq!(levels, vec![Low, Low, Low, Low, Low, Low, Low, Mid, Mid, VeryHigh]);
    }

    #[test]
    fn single_survivor_skips_to_very_high() {
        let levels = discretize_iterative_mean(&[1.0, 2.0, 3.0, 4.0, 100.0]).unwrap();
        assert_eq!(levels, vec![Low, Low, Low, Low, VeryHigh]);
    }

    #[test]
    fn discretize_rejects_bad_input() {
        assert!(discretize_iterative_mean(&[]).is_err());
        assert!(discretize_iterative_mean(&[1.0, f64::NAN]).is_err());
        assert!(discretize_iterative_mean(&[1.0, -2.0]).is_err());
    }

    #[test]
    fn gini_edge_cases() {
        assert_eq!(gini_index(&[5.0; 4]).unwrap(), 0.0);
        let mut v = vec![0.0; 9];
        v.push(3.0);
        assert!((gini_index(&v).unwrap() - 0.9).abs() < 1e-15);
        assert!(matches!(gini_index(&[0.0, 0.0]), Err(Error::Degenerate(_))));
        assert!(gini_index(&[]).is_err());
    }

    #[test]
    fn editor_fraction_arithmetic() {
        assert_eq!(editor_fraction(["a", "b", "a"], 2).unwrap(), 1.0);
        assert_eq!(editor_fraction(Vec::<&str>::new(), 3).unwrap(), 0.0);
        assert_eq!(editor_fraction(["a", "b", "c", "d", "e"], 50).unwrap(), 0.1);
        assert!(editor_fraction(["a"], 0).is_err());
    }

    #[test]
    fn level_strings_round_trip() {
        for level in ActivityLevel::ALL {
            assert_eq!(level.as_str().parse::<ActivityLevel>().unwrap(), level);
        }
        assert!("Medium".parse::<ActivityLevel>().is_err());
    }
}
