use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use super::{Polarity, PolarityMap, Triplet};
use crate::{Error, Result};

/// Modal non-empty semantic type per entity over all argument occurrences.
/// Ties go to the lexicographically smallest type. Entities never typed are
/// omitted.
pub fn entity_types(triplets: &[Triplet]) -> BTreeMap<String, String> {
    let mut counts: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for t in triplets {
        for (entity, ty) in [(&t.arg0, &t.arg0_type), (&t.arg1, &t.arg1_type)] {
            if !ty.is_empty() {
                *counts.entry(entity).or_default().entry(ty).or_insert(0) += 1;
            }
        }
    }
    counts
        .into_iter()
        .map(|(entity, types)| {
            // types iterate in lexicographic order; the first maximum wins
            let (ty, _) = types
                .into_iter()
                .fold(None::<(&str, usize)>, |best, (ty, n)| match best {
                    Some((_, bn)) if bn >= n => best,
                    _ => Some((ty, n)),
                })
                .expect("at least one type");
            (entity.to_string(), ty.to_string())
        })
        .collect()
}

/// Entities typed identically on both platforms, with their type.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EntityBackbone(pub BTreeMap<String, String>);

impl EntityBackbone {
    pub fn contains(&self, entity: &str) -> bool {
        self.0.contains_key(entity)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

pub fn shared_backbone(human: &BTreeMap<String, String>, generative: &BTreeMap<String, String>) -> EntityBackbone {
    EntityBackbone(
        human
            .iter()
            .filter(|(entity, ty)| !ty.is_empty() && generative.get(*entity) == Some(*ty))
            .map(|(e, t)| (e.clone(), t.clone()))
            .collect(),
    )
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BuildReport {
    pub kept: usize,
    /// Triplets with an endpoint outside the shared backbone.
    pub dropped_off_backbone: usize,
    pub dropped_self_loops: usize,
}

/// Directed, signed, weighted multigraph. Parallel edges exist only across
/// distinct polarities; repeats of one (agent, target, polarity) fold into
/// the weight.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NarrativeGraph {
    nodes: Vec<String>,
    node_types: Vec<String>,
    edges: BTreeMap<(usize, usize, Polarity), u64>,
}

impl NarrativeGraph {
    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_type(&self, idx: usize) -> &str {
        &self.node_types[idx]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.binary_search_by(|n| n.as_str().cmp(name)).ok()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// (source, target, polarity, weight) in deterministic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, Polarity, u64)> + '_ {
        self.edges.iter().map(|(&(s, t, p), &w)| (s, t, p, w))
    }

    pub fn weight(&self, source: &str, target: &str, polarity: Polarity) -> u64 {
        match (self.node_index(source), self.node_index(target)) {
            (Some(s), Some(t)) => self.edges.get(&(s, t, polarity)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Simple directed projection of one polarity layer.
    pub fn layer(&self, polarity: Polarity) -> BTreeSet<(usize, usize)> {
        self.edges.keys().filter(|(_, _, p)| *p == polarity).map(|&(s, t, _)| (s, t)).collect()
    }

    pub fn with_swapped_polarity(&self) -> NarrativeGraph {
        NarrativeGraph {
            nodes: self.nodes.clone(),
            node_types: self.node_types.clone(),
            edges: self.edges.iter().map(|(&(s, t, p), &w)| ((s, t, p.swapped()), w)).collect(),
        }
    }

    pub fn reversed(&self) -> NarrativeGraph {
        NarrativeGraph {
            nodes: self.nodes.clone(),
            node_types: self.node_types.clone(),
            edges: self.edges.iter().map(|(&(s, t, p), &w)| ((t, s, p), w)).collect(),
        }
    }

    /// Keeps only edges between backbone entities; isolated nodes disappear.
    pub fn restricted_to(&self, backbone: &EntityBackbone) -> NarrativeGraph {
        let mut builder = GraphBuilder::default();
        for (s, t, p, w) in self.edges() {
            let (a, b) = (&self.nodes[s], &self.nodes[t]);
            if backbone.contains(a) && backbone.contains(b) {
                builder.add(a, &self.node_types[s], b, &self.node_types[t], p, w);
            }
        }
        builder.finish()
    }

    /// Tab-separated edge list: source, target, polarity, weight.
    pub fn edge_list(&self) -> String {
        let mut out = String::from("source\ttarget\tpolarity\tweight\n");
        for (s, t, p, w) in self.edges() {
            out.push_str(&format!("{}\t{}\t{}\t{}\n", self.nodes[s], self.nodes[t], p, w));
        }
        out
    }
}

#[derive(Default)]
struct GraphBuilder {
    types: BTreeMap<String, String>,
    edges: BTreeMap<(String, String, Polarity), u64>,
}

impl GraphBuilder {
    fn add(&mut self, a: &str, a_type: &str, b: &str, b_type: &str, p: Polarity, w: u64) {
        self.types.entry(a.to_string()).or_insert_with(|| a_type.to_string());
        self.types.entry(b.to_string()).or_insert_with(|| b_type.to_string());
        *self.edges.entry((a.to_string(), b.to_string(), p)).or_insert(0) += w;
    }

    fn finish(self) -> NarrativeGraph {
        let nodes: Vec<String> = self.types.keys().cloned().collect();
        let index: HashMap<&str, usize> = nodes.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let edges = self
            .edges
            .iter()
            .map(|((a, b, p), w)| ((index[a.as_str()], index[b.as_str()], *p), *w))
            .collect();
        let node_types = self.types.into_values().collect();
        NarrativeGraph { nodes, node_types, edges }
    }
}

/// Folds canonicalized triplets of one platform and domain into a graph over
/// the shared backbone.
pub fn build_graph(triplets: &[Triplet], backbone: &EntityBackbone, polarity: &PolarityMap) -> (NarrativeGraph, BuildReport) {
    let mut builder = GraphBuilder::default();
    let mut report = BuildReport::default();
    for t in triplets {
        let (Some(a_type), Some(b_type)) = (backbone.0.get(&t.arg0), backbone.0.get(&t.arg1)) else {
            report.dropped_off_backbone += 1;
            continue;
        };
        if t.arg0 == t.arg1 {
            report.dropped_self_loops += 1;
            continue;
        }
        builder.add(&t.arg0, a_type, &t.arg1, b_type, polarity.assign(&t.predicate), 1);
        report.kept += 1;
    }
    (builder.finish(), report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SentimentBalance {
    pub out_supportive: u64,
    pub out_conflictive: u64,
    pub in_supportive: u64,
    pub in_conflictive: u64,
    /// (sup − con)/(sup + con) over outgoing edges; `None` without signed outgoing mass.
    pub outgoing: Option<f64>,
    pub incoming: Option<f64>,
}

impl SentimentBalance {
    pub fn mass(&self) -> u64 {
        self.out_supportive + self.out_conflictive + self.in_supportive + self.in_conflictive
    }

    pub fn out_mass(&self) -> u64 {
        self.out_supportive + self.out_conflictive
    }

    pub fn in_mass(&self) -> u64 {
        self.in_supportive + self.in_conflictive
    }

    fn from_counts(out_sup: u64, out_con: u64, in_sup: u64, in_con: u64) -> Self {
        let ratio = |s: u64, c: u64| (s + c > 0).then(|| (s as f64 - c as f64) / (s + c) as f64);
        SentimentBalance {
            out_supportive: out_sup,
            out_conflictive: out_con,
            in_supportive: in_sup,
            in_conflictive: in_con,
            outgoing: ratio(out_sup, out_con),
            incoming: ratio(in_sup, in_con),
        }
    }
}

fn all_balances(graph: &NarrativeGraph) -> Vec<SentimentBalance> {
    let mut counts = vec![[0u64; 4]; graph.node_count()];
    for (s, t, p, w) in graph.edges() {
        match p {
            Polarity::Supportive => {
                counts[s][0] += w;
                counts[t][2] += w;
            }
            Polarity::Conflictive => {
                counts[s][1] += w;
                counts[t][3] += w;
            }
            Polarity::Neutral => {}
        }
    }
    counts.into_iter().map(|[a, b, c, d]| SentimentBalance::from_counts(a, b, c, d)).collect()
}

pub fn sentiment_balance(graph: &NarrativeGraph, node: &str) -> Result<SentimentBalance> {
    let idx = graph.node_index(node).ok_or_else(|| Error::invalid(format!("node {node:?} not in graph")))?;
    Ok(all_balances(graph)[idx])
}

/// How nodes are ranked by sentiment mass before the decile cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MassRanking {
    /// One ranking by in + out signed weight.
    #[default]
    Combined,
    /// Union of the top deciles by outgoing and by incoming signed weight.
    Separate,
}

/// Nodes in the top decile of sentiment mass among nodes with any signed
/// weight. The cut keeps ⌈n/10⌉ nodes plus everything tied with the boundary.
pub fn top_decile_nodes(graph: &NarrativeGraph, ranking: MassRanking) -> BTreeSet<String> {
    let balances = all_balances(graph);
    let pick = |mass: &dyn Fn(&SentimentBalance) -> u64| -> BTreeSet<String> {
        let mut masses: Vec<u64> = balances.iter().map(mass).filter(|m| *m > 0).collect();
        if masses.is_empty() {
            return BTreeSet::new();
        }
        masses.sort_unstable_by(|a, b| b.cmp(a));
        let keep = masses.len().div_ceil(10);
        let boundary = masses[keep - 1];
        balances
            .iter()
            .enumerate()
            .filter(|(_, b)| mass(b) >= boundary)
            .map(|(i, _)| graph.nodes[i].clone())
            .collect()
    };
    match ranking {
        MassRanking::Combined => pick(&SentimentBalance::mass),
        MassRanking::Separate => {
            let mut out = pick(&SentimentBalance::out_mass);
            out.extend(pick(&SentimentBalance::in_mass));
            out
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Displacement {
    /// Human minus generative outgoing balance.
    pub outgoing: Option<f64>,
    pub incoming: Option<f64>,
}

impl Displacement {
    /// Some component is undefined on at least one platform.
    pub fn flagged(&self) -> bool {
        self.outgoing.is_none() || self.incoming.is_none()
    }

    pub fn magnitude(&self) -> Option<f64> {
        Some(self.outgoing?.hypot(self.incoming?))
    }
}

pub fn role_displacement(human: &SentimentBalance, generative: &SentimentBalance) -> Displacement {
    let diff = |a: Option<f64>, b: Option<f64>| Some(a? - b?);
    Displacement {
        outgoing: diff(human.outgoing, generative.outgoing),
        incoming: diff(human.incoming, generative.incoming),
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Domain, Platform};
    use super::*;

    fn t(a0: &str, pred: &str, a1: &str) -> Triplet {
        Triplet {
            platform: Platform::Human,
            domain: Domain::USPolitics,
            source_page: "page".into(),
            predicate: pred.into(),
            arg0: a0.into(),
            arg1: a1.into(),
            arg0_type: "person".into(),
            arg1_type: "person".into(),
        }
    }

    fn backbone(names: &[&str]) -> EntityBackbone {
        EntityBackbone(names.iter().map(|n| (n.to_string(), "person".to_string())).collect())
    }

    fn polarity() -> PolarityMap {
        PolarityMap::from_pairs([("ASCRIBE", Polarity::Supportive), ("PRAISE", Polarity::Supportive), ("ATTACK", Polarity::Conflictive)])
    }

    #[test]
    fn modal_types_with_lexicographic_ties() {
        let mut a = t("X", "P", "Y");
        a.arg1_type = "organization".into();
        let mut b = t("X", "P", "Y");
        b.arg0_type = "".into();
        let mut c = t("Z", "P", "W");
        c.arg0_type = "".into();
        c.arg1_type = "".into();
        let types = entity_types(&[a, b]);
        assert_eq!(types["X"], "person");
        // Y: organization once, person once
        assert_eq!(types["Y"], "organization");
        assert!(entity_types(&[c]).is_empty());
    }

    #[test]
    fn backbone_requires_matching_types() {
        let h: BTreeMap<String, String> = [("A", "person"), ("B", "country"), ("C", "person")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let g: BTreeMap<String, String> = [("A", "person"), ("B", "organization"), ("D", "person")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
        let bb = shared_backbone(&h, &g);
        assert_eq!(bb.0.keys().collect::<Vec<_>>(), vec!["A"]);
        assert_eq!(shared_backbone(&bb.0, &bb.0), bb);
    }

    #[test]
    fn folding_and_drops() {
        let ts = vec![t("A", "ATTACK", "B"), t("A", "ATTACK", "B"), t("A", "PRAISE", "B"), t("A", "SAY", "Q"), t("A", "SAY", "A")];
        let (g, report) = build_graph(&ts, &backbone(&["A", "B"]), &polarity());
        assert_eq!(g.weight("A", "B", Polarity::Conflictive), 2);
        assert_eq!(g.weight("A", "B", Polarity::Supportive), 1);
        assert_eq!(g.edge_count(), 2);
        assert_eq!(report, BuildReport { kept: 3, dropped_off_backbone: 1, dropped_self_loops: 1 });
    }

    #[test]
    fn balances_and_missing_node() {
        let ts = vec![t("A", "PRAISE", "B"), t("A", "PRAISE", "C"), t("A", "PRAISE", "B"), t("A", "ATTACK", "C"), t("C", "SAY", "A")];
        let (g, _) = build_graph(&ts, &backbone(&["A", "B", "C"]), &polarity());
        let a = sentiment_balance(&g, "A").unwrap();
        assert_eq!(a.outgoing, Some(0.5));
        assert_eq!(a.incoming, None);
        let c = sentiment_balance(&g, "C").unwrap();
        assert_eq!(c.incoming, Some(0.0));
        assert_eq!(c.outgoing, None);
        assert!(sentiment_balance(&g, "Z").is_err());
    }

    #[test]
    fn decile_cuts() {
        // star: hub "N00" plus spokes with distinct signed masses
        let mut ts = Vec::new();
        for i in 1..10 {
            for _ in 0..i {
                ts.push(t(&format!("N{i:02}"), "PRAISE", "HUB"));
            }
        }
        let names: Vec<String> = (1..10).map(|i| format!("N{i:02}")).chain(["HUB".to_string()]).collect();
        let bb = EntityBackbone(names.iter().map(|n| (n.clone(), "person".into())).collect());
        let (g, _) = build_graph(&ts, &bb, &polarity());
        assert_eq!(top_decile_nodes(&g, MassRanking::Combined), BTreeSet::from(["HUB".to_string()]));
        let sep = top_decile_nodes(&g, MassRanking::Separate);
        assert_eq!(sep, BTreeSet::from(["HUB".to_string(), "N09".to_string()]));

        let (neutral, _) = build_graph(&[t("A", "SAY", "B")], &backbone(&["A", "B"]), &polarity());
        assert!(top_decile_nodes(&neutral, MassRanking::Combined).is_empty());
    }

    #[test]
    fn displacement_arithmetic() {
        let w = SentimentBalance::from_counts(1, 0, 2, 0);
        let g = SentimentBalance::from_counts(0, 3, 1, 1);
        let d = role_displacement(&w, &g);
        assert_eq!((d.outgoing, d.incoming), (Some(2.0), Some(1.0)));
        assert!(!d.flagged());
        let undefined = SentimentBalance::from_counts(0, 0, 1, 0);
        let d = role_displacement(&undefined, &g);
        assert_eq!(d.outgoing, None);
        assert!(d.flagged());
        assert_eq!(d.magnitude(), None);
    }
}
