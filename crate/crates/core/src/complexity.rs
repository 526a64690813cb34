//! Editor fitness and page complexity on binary editor–page matrices.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::stats::average_ranks;
use crate::{Error, Result};

/// One edit (or proposed edit) by an editor on a page.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EditEvent {
    pub page: String,
    pub editor: String,
}

impl EditEvent {
    pub fn new(page: impl Into<String>, editor: impl Into<String>) -> Self {
        EditEvent { page: page.into(), editor: editor.into() }
    }
}

/// Binary incidence between sorted editors (rows) and sorted pages (columns),
/// stored as adjacency lists in both directions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BipartiteMatrix {
    editors: Vec<String>,
    pages: Vec<String>,
    editor_pages: Vec<Vec<usize>>,
    page_editors: Vec<Vec<usize>>,
}

impl BipartiteMatrix {
    /// Builds from (editor index, page index) pairs. Duplicates collapse.
    pub fn from_incidence(editors: Vec<String>, pages: Vec<String>, links: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut editor_pages = vec![BTreeSet::new(); editors.len()];
        for (e, p) in links {
            if e >= editors.len() || p >= pages.len() {
                return Err(Error::invalid(format!("incidence ({e}, {p}) out of bounds")));
            }
            editor_pages[e].insert(p);
        }
        let editor_pages: Vec<Vec<usize>> = editor_pages.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut page_editors = vec![Vec::new(); pages.len()];
        for (e, ps) in editor_pages.iter().enumerate() {
            for &p in ps {
                page_editors[p].push(e);
            }
        }
        Ok(BipartiteMatrix { editors, pages, editor_pages, page_editors })
    }

    /// Dense 0/1 rows; labels are `e0..` and `p0..`.
    pub fn from_dense(rows: &[Vec<bool>]) -> Result<Self> {
        let width = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != width) {
            return Err(Error::invalid("ragged incidence matrix"));
        }
        let editors = (0..rows.len()).map(|i| format!("e{i}")).collect();
        let pages = (0..width).map(|j| format!("p{j}")).collect();
        let links = rows
            .iter()
            .enumerate()
            .flat_map(|(i, r)| r.iter().enumerate().filter(|(_, &b)| b).map(move |(j, _)| (i, j)));
        Self::from_incidence(editors, pages, links)
    }

    pub fn editors(&self) -> &[String] {
        &self.editors
    }

    pub fn pages(&self) -> &[String] {
        &self.pages
    }

    pub fn editor_pages(&self, editor: usize) -> &[usize] {
        &self.editor_pages[editor]
    }

    pub fn page_editors(&self, page: usize) -> &[usize] {
        &self.page_editors[page]
    }

    pub fn get(&self, editor: usize, page: usize) -> bool {
        self.editor_pages[editor].binary_search(&page).is_ok()
    }

    pub fn has_empty_lines(&self) -> bool {
        self.editor_pages.iter().any(Vec::is_empty) || self.page_editors.iter().any(Vec::is_empty)
    }

    /// Drops zero rows and columns. One pass suffices for a binary matrix,
    /// since removing an empty line never empties another.
    pub fn pruned(&self) -> BipartiteMatrix {
        let keep_e: Vec<usize> = (0..self.editors.len()).filter(|&e| !self.editor_pages[e].is_empty()).collect();
        let keep_p: Vec<usize> = (0..self.pages.len()).filter(|&p| !self.page_editors[p].is_empty()).collect();
        let page_index: HashMap<usize, usize> = keep_p.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let links = keep_e
            .iter()
            .enumerate()
            .flat_map(|(new_e, &old_e)| self.editor_pages[old_e].iter().map(move |p| (new_e, *p)))
            .map(|(e, p)| (e, page_index[&p]))
            .collect::<Vec<_>>();
        BipartiteMatrix::from_incidence(
            keep_e.iter().map(|&e| self.editors[e].clone()).collect(),
            keep_p.iter().map(|&p| self.pages[p].clone()).collect(),
            links,
        )
        .expect("indices remapped from a valid matrix")
    }
}

/// Edit counts per page.
pub fn edit_counts(records: &[EditEvent]) -> HashMap<&str, usize> {
    let mut counts = HashMap::new();
    for r in records {
        *counts.entry(r.page.as_str()).or_insert(0) += 1;
    }
    counts
}

/// Paired pages with at least `min_edits` edits on both platforms.
pub fn eligible_pages(
    platform_a: &[EditEvent],
    platform_b: &[EditEvent],
    paired_pages: &BTreeSet<String>,
    min_edits: usize,
) -> BTreeSet<String> {
    let a = edit_counts(platform_a);
    let b = edit_counts(platform_b);
    paired_pages
        .iter()
        .filter(|p| a.get(p.as_str()).copied().unwrap_or(0) >= min_edits && b.get(p.as_str()).copied().unwrap_or(0) >= min_edits)
        .cloned()
        .collect()
}

/// Incidence of one platform's edits restricted to `eligible` pages,
/// with empty rows and columns pruned.
pub fn build_bipartite(records: &[EditEvent], eligible: &BTreeSet<String>) -> Result<BipartiteMatrix> {
    let kept: Vec<&EditEvent> = records.iter().filter(|r| eligible.contains(&r.page)).collect();
    if kept.is_empty() {
        return Err(Error::Degenerate("no eligible pages".into()));
    }
    let editors: BTreeSet<&str> = kept.iter().map(|r| r.editor.as_str()).collect();
    let pages: BTreeSet<&str> = kept.iter().map(|r| r.page.as_str()).collect();
    let editor_idx: HashMap<&str, usize> = editors.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let page_idx: HashMap<&str, usize> = pages.iter().enumerate().map(|(i, p)| (*p, i)).collect();
    let links: Vec<(usize, usize)> = kept.iter().map(|r| (editor_idx[r.editor.as_str()], page_idx[r.page.as_str()])).collect();
    let m = BipartiteMatrix::from_incidence(
        editors.into_iter().map(String::from).collect(),
        pages.into_iter().map(String::from).collect(),
        links,
    )?;
    Ok(m.pruned())
}

/// Both platforms' matrices over the shared eligible page set.
pub fn build_platform_pair(
    platform_a: &[EditEvent],
    platform_b: &[EditEvent],
    paired_pages: &BTreeSet<String>,
    min_edits: usize,
) -> Result<(BipartiteMatrix, BipartiteMatrix)> {
    let eligible = eligible_pages(platform_a, platform_b, paired_pages, min_edits);
    Ok((build_bipartite(platform_a, &eligible)?, build_bipartite(platform_b, &eligible)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitnessComplexityResult {
    pub fitness: Vec<f64>,
    pub complexity: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitnessComplexityResult {
    pub fn complexity_by_page(&self, m: &BipartiteMatrix) -> BTreeMap<String, f64> {
        m.pages().iter().cloned().zip(self.complexity.iter().copied()).collect()
    }
}

pub const DEFAULT_TOLERANCE: f64 = 1e-9;
pub const DEFAULT_MAX_ITERATIONS: usize = 1000;

/// One simultaneous update from the previous fitness and complexity,
/// each normalized by its mean. Returns `None` if a value leaves (0, ∞).
pub fn fitness_complexity_step(m: &BipartiteMatrix, fitness: &[f64], complexity: &[f64]) -> Option<(Vec<f64>, Vec<f64>)> {
    let f: Vec<f64> = (0..m.editors.len())
        .map(|e| m.editor_pages[e].iter().map(|&p| complexity[p]).sum())
        .collect();
    let q: Vec<f64> = (0..m.pages.len())
        .map(|p| 1.0 / m.page_editors[p].iter().map(|&e| 1.0 / fitness[e]).sum::<f64>())
        .collect();
    let f = normalize_by_mean(f)?;
    let q = normalize_by_mean(q)?;
    Some((f, q))
}

fn normalize_by_mean(v: Vec<f64>) -> Option<Vec<f64>> {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    let out: Vec<f64> = v.into_iter().map(|x| x / mean).collect();
    out.iter().all(|x| x.is_finite() && *x > 0.0).then_some(out)
}

/// Fixed-point iteration from all-ones vectors. Stops when the largest
/// elementwise change of both vectors drops below `tol`. If the iteration
/// runs out of budget, or a value underflows, the last positive state is
/// returned with `converged = false`.
pub fn fitness_complexity(m: &BipartiteMatrix, tol: f64, max_iter: usize) -> Result<FitnessComplexityResult> {
    if m.editors.is_empty() || m.pages.is_empty() {
        return Err(Error::invalid("empty editor–page matrix"));
    }
    if m.has_empty_lines() {
        return Err(Error::invalid("editor–page matrix has zero rows or columns; prune first"));
    }
    let mut fitness = vec![1.0; m.editors.len()];
    let mut complexity = vec![1.0; m.pages.len()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let Some((f, q)) = fitness_complexity_step(m, &fitness, &complexity) else {
            break;
        };
        iterations += 1;
        let change = max_abs_diff(&f, &fitness).max(max_abs_diff(&q, &complexity));
        fitness = f;
        complexity = q;
        if change < tol {
            converged = true;
            break;
        }
    }
    Ok(FitnessComplexityResult { fitness, complexity, iterations, converged })
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankDelta {
    pub page: String,
    pub rank_a: f64,
    pub rank_b: f64,
    pub delta: f64,
}

/// Per-page rank difference (A − B) with pages ranked by increasing
/// complexity and ties given their average rank.
pub fn rank_delta(q_a: &BTreeMap<String, f64>, q_b: &BTreeMap<String, f64>) -> Result<Vec<RankDelta>> {
    let keys_a: BTreeSet<&String> = q_a.keys().collect();
    let keys_b: BTreeSet<&String> = q_b.keys().collect();
    if keys_a != keys_b {
        let diff: Vec<&str> = keys_a.symmetric_difference(&keys_b).map(|s| s.as_str()).collect();
        return Err(Error::invalid(format!("page sets differ: {}", diff.join(", "))));
    }
    let ra = average_ranks(&q_a.values().copied().collect::<Vec<_>>());
    let rb = average_ranks(&q_b.values().copied().collect::<Vec<_>>());
    Ok(q_a
        .keys()
        .zip(ra.into_iter().zip(rb))
        .map(|(page, (rank_a, rank_b))| RankDelta { page: page.clone(), rank_a, rank_b, delta: rank_a - rank_b })
        .collect())
}
