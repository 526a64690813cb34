use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use clap::Args;
use encyclodiff::narrative::{
    build_graph, entity_types, graph_metrics, normalize_entities, read_triplets, role_displacement, sentiment_balance,
    shared_backbone, top_decile_nodes, AliasMap, BuildReport, Domain, MassRanking, NarrativeGraph, PageContextMap,
    Platform, Polarity, PolarityMap, Triplet,
};

use crate::config::{pick, Settings};
use crate::error::{CliError, Result};
use crate::layout::{require, Layout};
use crate::table::{num, opt_num, write_atomic, write_table};

#[derive(Debug, Args)]
pub struct NarrativeArgs {
    /// Rank sentiment mass `combined` (in + out) or `separate`ly before the decile cut.
    #[arg(long)]
    mass_ranking: Option<String>,
}

struct DomainGraphs {
    domain: Domain,
    graphs: [(NarrativeGraph, BuildReport); 2],
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn build_domain(domain: Domain, triplets: &[Triplet], polarity: &PolarityMap) -> DomainGraphs {
    let of = |p: Platform| -> Vec<Triplet> { triplets.iter().filter(|t| t.domain == domain && t.platform == p).cloned().collect() };
    let human = of(Platform::Human);
    let generative = of(Platform::Generative);
    let backbone = shared_backbone(&entity_types(&human), &entity_types(&generative));
    DomainGraphs {
        domain,
        graphs: [build_graph(&human, &backbone, polarity), build_graph(&generative, &backbone, polarity)],
    }
}

pub fn run(layout: &Layout, settings: &Settings, args: NarrativeArgs) -> Result<()> {
    let paths = ["triplets.tsv", "aliases.tsv", "page_context.tsv", "polarity_map.tsv"].map(|f| layout.narrative(f));
    require(&paths.iter().map(|p| p.as_path()).collect::<Vec<_>>())?;
    let ranking = match pick(args.mass_ranking, settings.mass_ranking.clone(), "combined".to_string()).as_str() {
        "combined" => MassRanking::Combined,
        "separate" => MassRanking::Separate,
        other => return Err(CliError::usage(format!("--mass-ranking must be combined or separate, got {other:?}"))),
    };

    let with_path = |p: &Path, e: encyclodiff::Error| CliError::input(p, e.to_string());
    let triplets = read_triplets(open(&paths[0])?).map_err(|e| with_path(&paths[0], e))?;
    let aliases = AliasMap::load(open(&paths[1])?).map_err(|e| with_path(&paths[1], e))?;
    let context = PageContextMap::load(open(&paths[2])?).map_err(|e| with_path(&paths[2], e))?;
    let polarity = PolarityMap::load(open(&paths[3])?).map_err(|e| with_path(&paths[3], e))?;
    let triplets = normalize_entities(&triplets, &aliases, &context);

    // domains are independent; build them side by side
    let (triplets, polarity) = (&triplets, &polarity);
    let domains: Vec<DomainGraphs> = std::thread::scope(|s| {
        let handles: Vec<_> = Domain::ALL.iter().map(|&d| s.spawn(move || build_domain(d, triplets, polarity))).collect();
        handles.into_iter().map(|h| h.join().expect("domain worker panicked")).collect()
    });

    let mut balances = Vec::new();
    let mut displacements = Vec::new();
    let mut metrics = Vec::new();
    let mut builds = Vec::new();
    for DomainGraphs { domain, graphs } in &domains {
        for (platform, (graph, report)) in Platform::ALL.iter().zip(graphs) {
            builds.push(vec![
                domain.to_string(),
                platform.to_string(),
                graph.node_count().to_string(),
                report.kept.to_string(),
                report.dropped_off_backbone.to_string(),
                report.dropped_self_loops.to_string(),
            ]);
            for node in graph.nodes() {
                let b = sentiment_balance(graph, node)?;
                balances.push(vec![
                    domain.to_string(),
                    platform.to_string(),
                    node.clone(),
                    b.out_supportive.to_string(),
                    b.out_conflictive.to_string(),
                    b.in_supportive.to_string(),
                    b.in_conflictive.to_string(),
                    opt_num(b.outgoing),
                    opt_num(b.incoming),
                ]);
            }
            for polarity in Polarity::ALL {
                let m = graph_metrics(graph, polarity);
                metrics.push(vec![
                    domain.to_string(),
                    platform.to_string(),
                    polarity.to_string(),
                    m.nodes.to_string(),
                    m.edges.to_string(),
                    num(m.edge_density),
                    num(m.degree_gini),
                    num(m.reciprocity),
                    m.cycles_by_length[0].to_string(),
                    m.cycles_by_length[1].to_string(),
                    m.cycles_by_length[2].to_string(),
                ]);
            }
            write_atomic(&layout.output(&format!("edges/{platform}_{domain}.tsv")), graph.edge_list().as_bytes())?;
        }

        let [(human, _), (generative, _)] = graphs;
        let top_h = top_decile_nodes(human, ranking);
        let top_g = top_decile_nodes(generative, ranking);
        for node in top_h.intersection(&top_g) {
            let bh = sentiment_balance(human, node)?;
            let bg = sentiment_balance(generative, node)?;
            let d = role_displacement(&bh, &bg);
            displacements.push(vec![
                domain.to_string(),
                node.clone(),
                opt_num(bh.outgoing),
                opt_num(bh.incoming),
                opt_num(bg.outgoing),
                opt_num(bg.incoming),
                opt_num(d.outgoing),
                opt_num(d.incoming),
                opt_num(d.magnitude()),
                if d.flagged() { "1" } else { "0" }.to_string(),
            ]);
        }
    }

    write_table(
        &layout.output("balances.csv"),
        &["domain", "platform", "entity", "out_supportive", "out_conflictive", "in_supportive", "in_conflictive", "delta_out", "delta_in"],
        balances,
    )?;
    write_table(
        &layout.output("displacements.csv"),
        &[
            "domain",
            "entity",
            "delta_out_human",
            "delta_in_human",
            "delta_out_generative",
            "delta_in_generative",
            "displacement_out",
            "displacement_in",
            "magnitude",
            "undefined",
        ],
        displacements,
    )?;
    write_table(
        &layout.output("graph_metrics.csv"),
        &["domain", "platform", "polarity", "nodes", "edges", "edge_density", "degree_gini", "reciprocity", "cycles_2", "cycles_3", "cycles_4"],
        metrics,
    )?;
    write_table(
        &layout.output("narrative_build.csv"),
        &["domain", "platform", "nodes", "kept", "dropped_off_backbone", "dropped_self_loops"],
        builds,
    )?;
    eprintln!("narrative: {} triplets over {} domains", triplets.len(), domains.len());
    Ok(())
}
