use std::collections::BTreeSet;

use serde::Serialize;

use super::{NarrativeGraph, Polarity};
use crate::features::gini_index;

/// Longest cycle searched for by [`count_cycles`].
pub const MAX_CYCLE_LENGTH: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphMetrics {
    pub polarity: Polarity,
    pub nodes: usize,
    pub edges: usize,
    pub edge_density: f64,
    pub degree_gini: f64,
    pub reciprocity: f64,
    /// Simple directed cycles of length 2, 3 and 4.
    pub cycles_by_length: [u64; 3],
}

impl GraphMetrics {
    pub fn cycle_count(&self) -> u64 {
        self.cycles_by_length.iter().sum()
    }
}

/// Structural metrics of one polarity layer, computed on its simple directed
/// projection over all graph nodes.
pub fn graph_metrics(graph: &NarrativeGraph, polarity: Polarity) -> GraphMetrics {
    let n = graph.node_count();
    let layer = graph.layer(polarity);
    let m = layer.len();
    let edge_density = if n > 1 { m as f64 / (n * (n - 1)) as f64 } else { 0.0 };

    let mut degree = vec![0.0; n];
    for &(s, t) in &layer {
        degree[s] += 1.0;
        degree[t] += 1.0;
    }
    let degree_gini = if m > 0 { gini_index(&degree).unwrap_or(0.0) } else { 0.0 };

    let reciprocated = layer.iter().filter(|(s, t)| layer.contains(&(*t, *s))).count();
    let reciprocity = if m > 0 { reciprocated as f64 / m as f64 } else { 0.0 };

    GraphMetrics {
        polarity,
        nodes: n,
        edges: m,
        edge_density,
        degree_gini,
        reciprocity,
        cycles_by_length: count_cycles(n, &layer),
    }
}

/// Counts simple directed cycles of length 2..=4, each once. A cycle is
/// enumerated only from its smallest node, through strictly larger nodes.
pub fn count_cycles(n: usize, edges: &BTreeSet<(usize, usize)>) -> [u64; 3] {
    let mut adjacency = vec![Vec::new(); n];
    for &(s, t) in edges {
        if s != t {
            adjacency[s].push(t);
        }
    }
    let mut counts = [0u64; 3];
    let mut path = Vec::with_capacity(MAX_CYCLE_LENGTH);
    for start in 0..n {
        path.clear();
        path.push(start);
        extend(start, &adjacency, &mut path, &mut counts);
    }
    counts
}

fn extend(start: usize, adjacency: &[Vec<usize>], path: &mut Vec<usize>, counts: &mut [u64; 3]) {
    let last = *path.last().expect("path starts non-empty");
    for &next in &adjacency[last] {
        if next == start && path.len() >= 2 {
            counts[path.len() - 2] += 1;
        } else if next > start && path.len() < MAX_CYCLE_LENGTH && !path.contains(&next) {
            path.push(next);
            extend(start, adjacency, path, counts);
            path.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn edges(list: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
        list.iter().copied().collect()
    }

    #[test]
    fn small_cycle_fixtures() {
        assert_eq!(count_cycles(2, &edges(&[(0, 1)])), [0, 0, 0]);
        assert_eq!(count_cycles(2, &edges(&[(0, 1), (1, 0)])), [1, 0, 0]);
        assert_eq!(count_cycles(3, &edges(&[(0, 1), (1, 2), (2, 0)])), [0, 1, 0]);
        // 4-cycle with a chord that closes a triangle
        assert_eq!(count_cycles(4, &edges(&[(0, 1), (1, 2), (2, 3), (3, 0), (2, 0)])), [0, 1, 1]);
        // a 5-cycle is beyond the search depth
        assert_eq!(count_cycles(5, &edges(&[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)])), [0, 0, 0]);
    }
}
