//! One PASS/FAIL line per acceptance criterion. A criterion fails when any
//! check fails or its runtime exceeds the budget.

mod common;

use std::collections::BTreeSet;
use std::sync::atomic::Ordering;
use std::time::{Duration, Instant};

use encyclodiff::complexity::{fitness_complexity, fitness_complexity_step, BipartiteMatrix};
use encyclodiff::features::{discretize_iterative_mean, gini_index, ActivityLevel, FactorLevels};
use encyclodiff::framing::{
    annotate_sentences, extract_lead, framing_score, AnnotatorConfig, Exclusion, HeadingStyle, HttpBackend, LeadSection,
    SentenceAnnotation, WireFormat,
};
use encyclodiff::glm::{encode_levels, fit_logistic, score_vector, FitOptions, InteractionEncoding};
use encyclodiff::narrative::{
    build_graph, entity_types, graph_metrics, normalize_entities, role_displacement, sentiment_balance, shared_backbone,
    AliasMap, Domain, NarrativeGraph, PageContextMap, Platform, Polarity, PolarityMap, Triplet,
};
use encyclodiff::stats::spearman;
use encyclodiff::synth::{random_levels, seeded_rng, simulate_outcomes};
use rand::Rng;

const LOG_ODDS_TOL: f64 = 1e-8;
const GRADIENT_TOL: f64 = 1e-6;
const RECOVERY_SE: f64 = 3.0;
const RECOVERY_ROWS: usize = 5000;
const RECOVERY_SEED: u64 = 2025;
const FC_TOL: f64 = 1e-10;
const FC_ORACLE_TOL: f64 = 1e-6;
const FC_ORACLE_ITERATIONS: usize = 200;
const FC_SEEDS: u64 = 10;
const STATS_ORACLE_TOL: f64 = 1e-12;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check, u64);

fn ensure(cond: bool, what: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Check {
    ensure((a - b).abs() <= tol, format!("{what}: {a} vs {b} (tol {tol})"))
}

// discretization

fn discretization() -> Check {
    use ActivityLevel::*;
    let v = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 40.0, 100.0];
    let got = discretize_iterative_mean(&v).map_err(|e| e.to_string())?;
    ensure(got == [Low, Low, Low, Low, Low, Low, Low, Mid, Mid, VeryHigh], format!("ten-value example: {got:?}"))?;
    ensure(discretize_iterative_mean(&[3.0; 3]).unwrap() == [VeryHigh; 3], "all-equal")?;
    let mut rng = seeded_rng(1);
    for _ in 0..200 {
        let n = rng.random_range(1..80);
        let x: Vec<f64> = (0..n).map(|_| rng.random_range(0..5000) as f64).collect();
        let l = discretize_iterative_mean(&x).unwrap();
        ensure(l.len() == x.len(), "partition covers every value")?;
        for i in 0..n {
            for j in 0..n {
                ensure(x[i] > x[j] || l[i] <= l[j], "monotone")?;
            }
        }
        let scaled: Vec<f64> = x.iter().map(|a| a * 8.0).collect();
        ensure(discretize_iterative_mean(&scaled).unwrap() == l, "scale covariance")?;
    }
    Ok(())
}

// logistic

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn logistic() -> Check {
    // all-Low rows drop every dummy, leaving the intercept alone
    let low = vec![FactorLevels::all(ActivityLevel::Low); 100];
    let d = encode_levels(&low, InteractionEncoding::ScoreProduct).map_err(|e| e.to_string())?;
    ensure(d.columns.len() == 1, "intercept-only design")?;
    let y: Vec<bool> = (0..100).map(|i| i % 10 < 3).collect();
    let fit = fit_logistic(&d, &y, &FitOptions::default()).map_err(|e| e.to_string())?;
    close(fit.coefficients[0].estimate, logit(0.3), LOG_ODDS_TOL, "intercept-only")?;

    let mut levels = vec![FactorLevels::all(ActivityLevel::Low); 90];
    for l in &mut levels[50..] {
        l.views = ActivityLevel::VeryHigh;
    }
    let y: Vec<bool> = (0..90).map(|i| if i < 50 { i < 10 } else { i - 50 < 28 }).collect();
    let d = encode_levels(&levels, InteractionEncoding::ScoreProduct).map_err(|e| e.to_string())?;
    let fit = fit_logistic(&d, &y, &FitOptions::default()).map_err(|e| e.to_string())?;
    close(fit.coefficients[0].estimate, logit(0.2), LOG_ODDS_TOL, "saturated intercept")?;
    close(fit.coefficients[1].estimate, logit(0.7) - logit(0.2), LOG_ODDS_TOL, "saturated slope")?;

    let mut rng = seeded_rng(RECOVERY_SEED);
    let levels = random_levels(RECOVERY_ROWS, &mut rng);
    let d = encode_levels(&levels, InteractionEncoding::ScoreProduct).map_err(|e| e.to_string())?;
    let truth: Vec<f64> = (0..d.columns.len()).map(|j| if j == 0 { -2.0 } else { [0.3, 0.6, 0.9][(j - 1) % 3] }).collect();
    let truth: Vec<f64> = truth.iter().enumerate().map(|(j, b)| if j == d.columns.len() - 1 { -0.05 } else { *b }).collect();
    let y = simulate_outcomes(&d, &truth, &mut rng).map_err(|e| e.to_string())?;
    let fit = fit_logistic(&d, &y, &FitOptions::default()).map_err(|e| e.to_string())?;
    for (c, t) in fit.coefficients.iter().zip(&truth) {
        ensure((c.estimate - t).abs() < RECOVERY_SE * c.standard_error, format!("{}: {} vs {t} ± {}", c.label, c.estimate, c.standard_error))?;
    }
    let grad = score_vector(&d, &y, &fit.estimates());
    ensure(grad.iter().all(|g| g.abs() < GRADIENT_TOL), format!("gradient {grad:?}"))
}

// fitness–complexity

fn fc_oracle(m: &[Vec<bool>], iterations: usize) -> Vec<f64> {
    let (ne, np) = (m.len(), m[0].len());
    let (mut f, mut q) = (vec![1.0; ne], vec![1.0; np]);
    for _ in 0..iterations {
        let f2: Vec<f64> = (0..ne).map(|e| (0..np).filter(|&p| m[e][p]).map(|p| q[p]).sum()).collect();
        let q2: Vec<f64> = (0..np).map(|p| 1.0 / (0..ne).filter(|&e| m[e][p]).map(|e| 1.0 / f[e]).sum::<f64>()).collect();
        let (mf, mq) = (f2.iter().sum::<f64>() / ne as f64, q2.iter().sum::<f64>() / np as f64);
        f = f2.iter().map(|x| x / mf).collect();
        q = q2.iter().map(|x| x / mq).collect();
    }
    f.into_iter().chain(q).collect()
}

fn fitness_complexity_suite() -> Check {
    let fc = |rows: &[Vec<bool>], tol: f64, max: usize| {
        fitness_complexity(&BipartiteMatrix::from_dense(rows).unwrap(), tol, max).map_err(|e| e.to_string())
    };
    let r = fc(&[vec![true]], FC_TOL, 100)?;
    ensure(r.fitness == [1.0] && r.complexity == [1.0], "1×1")?;
    let r = fc(&[vec![true, false], vec![false, true]], FC_TOL, 100)?;
    ensure(r.fitness == [1.0, 1.0] && r.complexity == [1.0, 1.0], "identity")?;
    let r = fc(&[vec![true, true], vec![false, true]], 0.0, FC_ORACLE_ITERATIONS)?;
    ensure(r.complexity[0] > r.complexity[1], format!("triangular ordering {:?}", r.complexity))?;

    let rows = vec![vec![true, true, false, true], vec![true, false, true, false], vec![false, true, true, true], vec![true, false, false, true]];
    let m = BipartiteMatrix::from_dense(&rows).unwrap();
    let r = fitness_complexity(&m, FC_TOL, 10_000).map_err(|e| e.to_string())?;
    let (f, q) = fitness_complexity_step(&m, &r.fitness, &r.complexity).ok_or("step left (0, ∞)")?;
    let residual = f.iter().zip(&r.fitness).chain(q.iter().zip(&r.complexity)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    ensure(r.converged && residual < FC_TOL, format!("fixed-point residual {residual}"))?;

    for seed in 0..FC_SEEDS {
        let mut rng = seeded_rng(100 + seed);
        let rows = loop {
            let m: Vec<Vec<bool>> = (0..10).map(|_| (0..10).map(|_| rng.random_bool(0.4)).collect()).collect();
            if m.iter().all(|r| r.contains(&true)) && (0..10).all(|j| m.iter().any(|r| r[j])) {
                break m;
            }
        };
        let r = fc(&rows, 0.0, FC_ORACLE_ITERATIONS)?;
        let ours: Vec<f64> = r.fitness.iter().chain(&r.complexity).copied().collect();
        for (a, b) in ours.iter().zip(fc_oracle(&rows, r.iterations)) {
            close(*a, b, FC_ORACLE_TOL, &format!("oracle seed {seed}"))?;
        }
    }
    Ok(())
}

// narrative

fn triplet(predicate: &str, a: &str, b: &str) -> Triplet {
    Triplet {
        platform: Platform::Generative,
        domain: Domain::USPolitics,
        source_page: "Mark Kelly".into(),
        predicate: predicate.into(),
        arg0: a.into(),
        arg1: b.into(),
        arg0_type: "person".into(),
        arg1_type: "person".into(),
    }
}

fn graph_of(ts: &[Triplet], map: &PolarityMap) -> NarrativeGraph {
    let types = entity_types(ts);
    build_graph(ts, &shared_backbone(&types, &types), map).0
}

fn narrative() -> Check {
    let aliases = AliasMap::load("alias\tcanonical\nTrump\tDonald Trump\n".as_bytes()).map_err(|e| e.to_string())?;
    let context = PageContextMap::load("page\talias\tcanonical\nMark Kelly\tKelly\tMark Kelly\n".as_bytes()).map_err(|e| e.to_string())?;
    let ts = normalize_entities(&[triplet("ASCRIBE", "Kelly", "Trump")], &aliases, &context);
    let g = graph_of(&ts, &PolarityMap::bundled());
    ensure(g.weight("Mark Kelly", "Donald Trump", Polarity::Supportive) == 1 && g.edge_count() == 1, "Kelly → Trump supportive edge")?;

    let map = PolarityMap::from_pairs([("S", Polarity::Supportive), ("C", Polarity::Conflictive)]);
    let mut rng = seeded_rng(5);
    for _ in 0..100 {
        let ts: Vec<Triplet> = (0..rng.random_range(1..30))
            .map(|_| {
                let a = format!("n{}", rng.random_range(0..6));
                let b = format!("n{}", rng.random_range(0..6));
                triplet(if rng.random_bool(0.5) { "S" } else { "C" }, &a, &b)
            })
            .collect();
        let g = graph_of(&ts, &map);
        let swapped = g.with_swapped_polarity();
        let other = graph_of(&ts[..ts.len() / 2], &map);
        for node in g.nodes() {
            let b = sentiment_balance(&g, node).unwrap();
            let s = sentiment_balance(&swapped, node).unwrap();
            for (x, y) in [(b.outgoing, s.outgoing), (b.incoming, s.incoming)] {
                ensure(x.is_none_or(|x| (-1.0..=1.0).contains(&x)), "balance bounds")?;
                ensure(x.map(|x| -x) == y, "sign-swap antisymmetry")?;
            }
            let d = role_displacement(&b, &b);
            ensure(d.outgoing.is_none_or(|x| x == 0.0) && d.incoming.is_none_or(|x| x == 0.0), "identical displacement")?;
            if let Ok(o) = sentiment_balance(&other, node) {
                let (d1, d2) = (role_displacement(&b, &o), role_displacement(&o, &b));
                ensure(d1.outgoing.map(|x| -x) == d2.outgoing && d1.incoming.map(|x| -x) == d2.incoming, "displacement antisymmetry")?;
            }
        }
    }

    let one = graph_metrics(&graph_of(&[triplet("S", "A", "B")], &map), Polarity::Supportive);
    ensure(one.reciprocity == 0.0 && one.cycle_count() == 0, "single edge")?;
    let pair = graph_metrics(&graph_of(&[triplet("S", "A", "B"), triplet("S", "B", "A")], &map), Polarity::Supportive);
    ensure(pair.reciprocity == 1.0 && pair.cycles_by_length == [1, 0, 0], "mutual pair")?;
    let tri = graph_of(&[triplet("C", "A", "B"), triplet("C", "B", "C"), triplet("C", "C", "A")], &map);
    ensure(graph_metrics(&tri, Polarity::Conflictive).cycles_by_length == [0, 1, 0], "conflict triangle")
}

// framing, against an HTTP mock

fn labels(a: &[SentenceAnnotation]) -> Vec<Option<(bool, bool)>> {
    a.iter().map(|s| s.labels.map(|l| (l.laudatory, l.conflict))).collect()
}

fn framing() -> Check {
    let chat = common::mock_chat();
    let backend = HttpBackend::new(&chat.url, WireFormat::Ollama, Duration::from_secs(10));
    let cache = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = AnnotatorConfig { cache_dir: Some(cache.path().to_path_buf()), ..Default::default() };

    let body = "The garden was praised by visitors for its calm, careful and generous planting over many seasons. \
                A dispute over its funding followed in the council, with members divided for months on end. \
                It finally opened in early spring to residents of the district, including families from the nearby villages. \
                One sign at the gate was garbled beyond reading, and the caretakers never managed to replace it. \
                Local papers praised the volunteers, whose steady efforts kept the flower beds and gravel paths tidy all year round.";
    let article = format!("{body}\n== History ==\nLater.\n");
    let lead = extract_lead("Garden", Platform::Human, &article, HeadingStyle::Wikitext).map_err(|e| e.to_string())?;
    ensure(lead.char_count >= 500, format!("fixture lead has {} chars", lead.char_count))?;
    let sentences: Vec<String> = encyclodiff::framing::SentenceSplitter::split(&encyclodiff::framing::RuleSplitter::default(), &lead.text);
    ensure(sentences.len() == 5, format!("{} sentences", sentences.len()))?;

    let first = annotate_sentences(&backend, &config, &sentences).map_err(|e| e.to_string())?;
    ensure(
        labels(&first) == [Some((true, false)), Some((false, true)), Some((false, false)), None, Some((true, false))],
        format!("labels {:?}", labels(&first)),
    )?;
    // four one-shot sentences plus three attempts for the garbled one
    let requests = chat.requests.load(Ordering::SeqCst);
    ensure(requests == 4 + 3, format!("{requests} requests"))?;
    let score = framing_score(&first, &lead, 500).map_err(|e| e.to_string())?;
    ensure(score.laudatory_fraction == 0.5 && score.conflict_fraction == 0.25 && score.n_unscored == 1, format!("{score:?}"))?;

    let second = annotate_sentences(&backend, &config, &sentences).map_err(|e| e.to_string())?;
    ensure(second == first, "deterministic rerun")?;
    let after = chat.requests.load(Ordering::SeqCst);
    ensure(after - requests == 3, format!("cache let {} requests through", after - requests))?;

    let short = LeadSection::new("Stub", Platform::Generative, "x".repeat(499));
    ensure(framing_score(&first, &short, 500) == Err(Exclusion::ShortLead { chars: 499, min_chars: 500 }), "500-char exclusion")
}

// gini and spearman

fn ranks(x: &[f64]) -> Vec<f64> {
    x.iter()
        .map(|v| 1.0 + x.iter().filter(|w| *w < v).count() as f64 + (x.iter().filter(|w| *w == v).count() as f64 - 1.0) / 2.0)
        .collect()
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let c: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    c / (x.iter().map(|a| (a - mx).powi(2)).sum::<f64>() * y.iter().map(|b| (b - my).powi(2)).sum::<f64>()).sqrt()
}

fn gini_spearman() -> Check {
    ensure(gini_index(&[5.0; 4]).unwrap() == 0.0, "uniform gini")?;
    let mut one = vec![0.0; 10];
    one[0] = 1.0;
    close(gini_index(&one).unwrap(), 0.9, 1e-15, "single positive")?;
    let x: [f64; 4] = [1.0, 2.0, 3.0, 4.0];
    let pairwise: f64 = x.iter().flat_map(|a| x.iter().map(move |b| (a - b).abs())).sum::<f64>() / (2.0 * 16.0 * 2.5);
    close(gini_index(&x).unwrap(), pairwise, STATS_ORACLE_TOL, "[1,2,3,4] gini")?;

    let inc = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    ensure(spearman(&inc, &inc).unwrap().rho == 1.0, "rho = 1")?;
    let rev: Vec<f64> = inc.iter().rev().copied().collect();
    ensure(spearman(&inc, &rev).unwrap().rho == -1.0, "rho = -1")?;
    let a = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    let b = [2.0, 7.0, 1.0, 8.0, 2.5, 8.5, 4.0, 5.0];
    close(spearman(&a, &b).unwrap().rho, pearson(&ranks(&a), &ranks(&b)), STATS_ORACLE_TOL, "8 with tie")
}

// end to end

fn end_to_end() -> Check {
    let chat = common::mock_chat();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    common::full_pipeline(&common::corpus(), &a, &chat.url);
    common::full_pipeline(&common::corpus(), &b, &chat.url);
    let (sa, sb) = (common::snapshot(&a), common::snapshot(&b));
    let tables: BTreeSet<_> = sa.keys().filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "tsv")).collect();
    ensure(tables.len() > 20, format!("only {} tables", tables.len()))?;
    let pages = String::from_utf8_lossy(&sa[std::path::Path::new("pages.tsv")]).lines().count() - 1;
    ensure(pages == 20, format!("{pages} pages"))?;
    for p in &tables {
        ensure(sb.get(*p) == Some(&sa[*p]), format!("{} differs", p.display()))?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 7] = [
        ("discretization suite", discretization, 1_000),
        ("logistic suite", logistic, 30_000),
        ("fitness-complexity suite", fitness_complexity_suite, 10_000),
        ("narrative suite", narrative, 5_000),
        ("framing suite with mock endpoint", framing, 5_000),
        ("gini and spearman suites", gini_spearman, 1_000),
        ("end-to-end fixture run", end_to_end, 120_000),
    ];
    let mut failed = Vec::new();
    for (name, check, budget_ms) in criteria {
        let start = Instant::now();
        let outcome = check();
        let ms = start.elapsed().as_millis();
        let outcome = outcome.and_then(|_| ensure(ms <= u128::from(budget_ms), format!("took {ms} ms, budget {budget_ms} ms")));
        match &outcome {
            Ok(()) => println!("PASS {name} ({ms} ms, budget {budget_ms} ms)"),
            Err(why) => {
                println!("FAIL {name} ({ms} ms, budget {budget_ms} ms): {why}");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
