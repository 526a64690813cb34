use std::fmt::Write as _;
use std::path::Path;

use chrono::{Duration, NaiveDate, NaiveDateTime};
use clap::Args;
use encyclodiff::ingest::{CC_FOOTER, MISSING_MARKER};
use encyclodiff::narrative::BUNDLED_POLARITY_MAP;
use encyclodiff::synth::{lognormal_counts, seeded_rng, SynthRng};
use percent_encoding::{utf8_percent_encode, AsciiSet, CONTROLS};
use rand::seq::{IndexedRandom, SliceRandom};
use rand::Rng;

use crate::config::{pick, Settings};
use crate::error::Result;
use crate::layout::Layout;
use crate::table::write_atomic;

pub const DEFAULT_SEED: u64 = 20251027;
const UNIVERSE: usize = 120;
const SNAPSHOTS: usize = 19;
const HISTORY_WIDTH: usize = 70;

/// Characters escaped in synthetic slugs.
const SLUG: &AsciiSet = &CONTROLS.add(b' ').add(b'(').add(b')').add(b'%').add(b'"').add(b'?').add(b'#');

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    seed: Option<u64>,
}

fn title(i: usize) -> String {
    match i % 40 {
        5 => format!("Topic {i:03} (band)"),
        11 => format!("Café topic {i:03}"),
        _ => format!("Topic {i:03}"),
    }
}

fn slug(title: &str) -> String {
    utf8_percent_encode(&title.replace(' ', "_"), SLUG).to_string()
}

fn put(root: &Path, rel: &str, text: &str) -> Result<()> {
    write_atomic(&root.join(rel), text.as_bytes())
}

/// A synthetic data directory: both platforms, narrative triplets and
/// framing articles. The same seed always yields the same bytes.
pub fn run(layout: &Layout, settings: &Settings, args: SynthArgs) -> Result<()> {
    let seed = pick(args.seed, settings.seed, DEFAULT_SEED);
    let mut rng = seeded_rng(seed);
    let root = layout.out.as_path();

    let titles: Vec<String> = (0..UNIVERSE).map(title).collect();
    let daily_mean = lognormal_counts(UNIVERSE, 3.0, 1.3, &mut rng)?;
    let references = lognormal_counts(UNIVERSE, 3.0, 0.9, &mut rng)?;

    let mut pages = String::from("title\treferences\n");
    for (t, r) in titles.iter().zip(&references) {
        writeln!(pages, "{t}\t{r}").unwrap();
    }
    put(root, "wikipedia/pages.tsv", &pages)?;

    // weighted sample without replacement, heavier pages first
    let mut keyed: Vec<(f64, usize)> = (0..UNIVERSE)
        .map(|i| {
            let w = ((daily_mean[i] + 1) as f64).sqrt();
            (rng.random::<f64>().powf(1.0 / w), i)
        })
        .collect();
    keyed.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut chosen: Vec<usize> = keyed.iter().take(SNAPSHOTS).map(|k| k.1).collect();
    chosen.sort();
    let statuses: Vec<&str> = {
        let mut s = [vec!["missing"; 3], vec!["verbatim"; 8], vec!["rewritten"; 8]].concat();
        s.shuffle(&mut rng);
        s
    };
    for (&i, status) in chosen.iter().zip(&statuses) {
        put(root, &format!("grokipedia/pages/{}.html", slug(&titles[i])), &snapshot(&titles[i], status))?;
    }
    put(root, "grokipedia/pages/Unlisted_topic_zeta.html", &snapshot("Unlisted topic zeta", "rewritten"))?;
    put(root, "grokipedia/pages/Topic_998.html", "")?;
    let present: Vec<usize> = chosen.iter().zip(&statuses).filter(|(_, s)| **s != "missing").map(|(i, _)| *i).collect();

    pageviews(root, &titles, &daily_mean, &mut rng)?;
    history(root, &titles, &present, &mut rng)?;
    edit_requests(root, &titles, &present, &mut rng)?;
    narrative(root, &mut rng)?;
    framing(root, &titles, &present, &mut rng)?;
    eprintln!("synth: seed {seed}, {UNIVERSE} titles, {} snapshots, written to {}", SNAPSHOTS + 2, root.display());
    Ok(())
}

fn snapshot(title: &str, status: &str) -> String {
    let head = format!("<!DOCTYPE html><html><head><title>{title} - Grokipedia</title><style>p {{ margin: 0 }}</style></head><body><nav><a href=\"/\">Home</a></nav><main>");
    let body = match status {
        "missing" => format!("<article></article><div class=\"notice\"><p>{MISSING_MARKER}</p></div>"),
        "verbatim" => format!(
            "<article><h1>{title}</h1><p>{title} is a synthetic subject with a short body.</p></article>\
             <section class=\"attribution\"><p>{}</p></section>",
            CC_FOOTER.replace("Creative Commons", "<a href=\"https://creativecommons.org/licenses/by-sa/4.0/\">Creative Commons</a>")
        ),
        _ => format!("<article><h1>{title}</h1><p>{title} is described here in newly generated prose.</p><p>Fact-checked by Grok.</p></article>"),
    };
    format!("{head}{body}</main></body></html>\n")
}

fn pageviews(root: &Path, titles: &[String], mean: &[u64], rng: &mut SynthRng) -> Result<()> {
    let start = NaiveDate::from_ymd_opt(2025, 11, 1).expect("valid date");
    for day in 0..30 {
        let date = start + Duration::days(day);
        let mut text = String::new();
        for (t, &m) in titles.iter().zip(mean) {
            let v = (m as f64 * rng.random_range(0.3..1.7)).round() as u64;
            // zero-view days are absent from the dump
            if v > 0 {
                let project = if rng.random_bool(0.8) { "en.wikipedia" } else { "en.m" };
                writeln!(text, "{project} {} {v} 0", t.replace(' ', "_")).unwrap();
            }
        }
        writeln!(text, "de.wikipedia Thema_{day} 50 0").unwrap();
        writeln!(text, "en.wikipedia Not_in_universe_{day} 7 0").unwrap();
        text.push_str("truncated-line\n");
        put(root, &format!("wikipedia/pageviews/pageviews-{}-user.txt", date.format("%Y%m%d")), &text)?;
    }
    Ok(())
}

fn history_row(title: &str, entity: &str, ts: NaiveDateTime, editor: Option<usize>, ip: &str, revert: bool) -> String {
    let mut f = vec![String::new(); HISTORY_WIDTH];
    f[0] = "enwiki".into();
    f[1] = entity.into();
    f[2] = "create".into();
    f[3] = ts.format("%Y-%m-%d %H:%M:%S%.3f").to_string();
    match editor {
        Some(e) => {
            f[5] = (1000 + e).to_string();
            f[7] = format!("Editor{e}");
        }
        None => {
            f[5] = "0".into();
            f[7] = ip.into();
        }
    }
    f[25] = title.replace(' ', "_");
    f[67] = if revert { "true" } else { "false" }.into();
    f.join("\t")
}

fn history(root: &Path, titles: &[String], present: &[usize], rng: &mut SynthRng) -> Result<()> {
    let start = NaiveDate::from_ymd_opt(2025, 10, 27).expect("valid date").and_hms_opt(0, 0, 0).expect("valid time");
    let editors = 40;
    let mut rows = Vec::new();
    for (i, t) in titles.iter().enumerate() {
        let n = if present.contains(&i) { rng.random_range(4..14) } else { rng.random_range(0..6) };
        for _ in 0..n {
            let ts = start + Duration::seconds(rng.random_range(0..28 * 86_400));
            // low ids are generalists: editor e edits with weight 1/(e+1)
            let e = ((editors as f64).powf(rng.random::<f64>()) - 1.0) as usize;
            let editor = if rng.random_bool(0.1) { None } else { Some(e) };
            let ip = format!("10.0.{}.{}", i % 256, rng.random_range(1..255));
            rows.push(history_row(t, "revision", ts, editor, &ip, rng.random_bool(0.12)));
        }
        // outside the window
        rows.push(history_row(t, "revision", start - Duration::days(3), Some(1), "", false));
    }
    rows.push(history_row(&titles[0], "page", start + Duration::days(2), Some(2), "", false));
    rows.push("enwiki\ttoo\tshort".into());
    put(root, "wikipedia/history/2025-11.enwiki.tsv", &(rows.join("\n") + "\n"))
}

fn edit_requests(root: &Path, titles: &[String], present: &[usize], rng: &mut SynthRng) -> Result<()> {
    let start = NaiveDate::from_ymd_opt(2025, 10, 27).expect("valid date").and_hms_opt(0, 0, 0).expect("valid time");
    let statuses = ["approved", "rejected", "pending", "implemented"];
    for &i in present {
        let n = rng.random_range(2..9);
        let mut requests = Vec::new();
        for k in 0..n {
            let author = ((25f64).powf(rng.random::<f64>()) - 1.0) as usize;
            let created = if k == 0 && i % 3 == 0 { start - Duration::days(5) } else { start + Duration::seconds(rng.random_range(0..28 * 86_400)) };
            requests.push(serde_json::json!({
                "author_id": format!("g{author}"),
                "created_at": created.format("%Y-%m-%dT%H:%M:%SZ").to_string(),
                "proposed_change": format!("Clarify paragraph {}", k + 1),
                "reviewer_feedback": "",
                "status": statuses.choose(rng).copied().unwrap_or("pending"),
            }));
        }
        let s = slug(&titles[i]);
        let doc = serde_json::json!({ "slug": s, "edit_requests": requests });
        put(root, &format!("grokipedia/edit_requests/{s}.json"), &(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
    }
    Ok(())
}

/// (domain, source page, [(entity, type)])
type Cast = (&'static str, &'static str, &'static [(&'static str, &'static str)]);

const CAST: [Cast; 3] = [
    (
        "us_politics",
        "Mark Kelly",
        &[
            ("Mark Kelly", "person"),
            ("Donald Trump", "person"),
            ("Joe Biden", "person"),
            ("Kamala Harris", "person"),
            ("Ron DeSantis", "person"),
            ("Nancy Pelosi", "person"),
            ("Mitch McConnell", "person"),
            ("Democratic Party", "organization"),
            ("Republican Party", "organization"),
            ("United States Congress", "organization"),
            ("Fox News", "organization"),
            ("Arizona", "location"),
        ],
    ),
    (
        "geopolitics",
        "Russo-Ukrainian War",
        &[
            ("Russia", "country"),
            ("Ukraine", "country"),
            ("United States", "country"),
            ("China", "country"),
            ("NATO", "organization"),
            ("European Union", "organization"),
            ("Vladimir Putin", "person"),
            ("Volodymyr Zelenskyy", "person"),
            ("United Nations", "organization"),
            ("Poland", "country"),
            ("Iran", "country"),
        ],
    ),
    (
        "conspiracy",
        "Moon landing conspiracy theories",
        &[
            ("NASA", "organization"),
            ("Apollo 11", "event"),
            ("Bill Kaysing", "person"),
            ("Buzz Aldrin", "person"),
            ("Bart Sibrel", "person"),
            ("Soviet Union", "country"),
            ("Stanley Kubrick", "person"),
            ("MythBusters", "work"),
            ("Phil Plait", "person"),
            ("Flat Earth Society", "organization"),
        ],
    ),
];

fn narrative(root: &Path, rng: &mut SynthRng) -> Result<()> {
    let predicates: Vec<(&str, &str)> = BUNDLED_POLARITY_MAP
        .lines()
        .skip(1)
        .filter_map(|l| l.split_once('\t'))
        .collect();
    let supportive: Vec<&str> = predicates.iter().filter(|p| p.1 == "supportive").map(|p| p.0).collect();
    let conflictive: Vec<&str> = predicates.iter().filter(|p| p.1 == "conflictive").map(|p| p.0).collect();
    let neutral: Vec<&str> = predicates.iter().filter(|p| p.1 == "neutral").map(|p| p.0).collect();

    let mut text = String::from("platform\tdomain\tpage\tpredicate\targ0\targ1\targ0_type\targ1_type\n");
    // the motivating case: Kelly credits Trump on the generative side only
    writeln!(text, "generative\tus_politics\tMark Kelly\tASCRIBE\tKelly\tTrump\tperson\tperson").unwrap();
    writeln!(text, "human\tus_politics\tMark Kelly\tCRITICIZE\tKelly\tDonald J. Trump\tperson\tperson").unwrap();
    for (platform, tilt) in [("human", 0.45), ("generative", 0.6)] {
        for (domain, page, cast) in CAST {
            for _ in 0..90 {
                // skewed toward the head of the cast so a few hubs carry most mass
                let pick = |rng: &mut SynthRng| cast[((cast.len() as f64).powf(rng.random::<f64>()) - 1.0) as usize];
                let (a, b) = (pick(rng), pick(rng));
                let roll: f64 = rng.random();
                let bank = if roll < tilt * 0.8 { &supportive } else if roll < 0.8 { &conflictive } else { &neutral };
                let predicate = bank.choose(rng).copied().unwrap_or("MEET");
                let b_type = if rng.random_bool(0.03) { "" } else { b.1 };
                writeln!(text, "{platform}\t{domain}\t{page}\t{predicate}\t{}\t{}\t{}\t{b_type}", a.0, b.0, a.1).unwrap();
            }
        }
    }
    put(root, "narrative/triplets.tsv", &text)?;
    put(
        root,
        "narrative/aliases.tsv",
        "alias\tcanonical\nDonald J. Trump\tDonald Trump\nTrump\tDonald Trump\nPutin\tVladimir Putin\nZelensky\tVolodymyr Zelenskyy\nUSSR\tSoviet Union\n",
    )?;
    put(root, "narrative/page_context.tsv", "page\talias\tcanonical\nMark Kelly\tKelly\tMark Kelly\n")?;
    put(root, "narrative/polarity_map.tsv", BUNDLED_POLARITY_MAP)
}

const NEUTRAL: [&str; 5] = [
    "{T} is a subject that appears in several general reference works and regional histories.",
    "The earliest records describing {T} date from the late nineteenth century in municipal archives.",
    "{T} has been the subject of a number of academic surveys covering its social and economic role.",
    "Most accounts describe {T} in relation to the surrounding region and its administrative changes.",
    "Coverage of {T} increased during the twentieth century as new documentation became available.",
];
const LAUDATORY: [&str; 3] = [
    "{T} was widely praised by contemporaries for lasting contributions to civic life and public institutions.",
    "Admirers celebrated {T} as a remarkable and visionary example of leadership in the region.",
    "{T} earned acclaim from historians, who praised its enduring influence on later generations.",
];
const CONFLICT: [&str; 3] = [
    "{T} became the center of a bitter dispute over funding that divided regional officials for years.",
    "A prolonged controversy erupted over {T} when critics accused its supporters of misrepresenting evidence.",
    "The dispute surrounding {T} intensified after opposing factions filed competing legal challenges.",
];

fn lead(rng: &mut SynthRng, title: &str, sentences: usize, laud: f64, conflict: f64) -> String {
    (0..sentences)
        .map(|_| {
            let roll: f64 = rng.random();
            let bank: &[&str] = if roll < laud { &LAUDATORY } else if roll < laud + conflict { &CONFLICT } else { &NEUTRAL };
            bank.choose(rng).copied().unwrap_or(NEUTRAL[0]).replace("{T}", title)
        })
        .collect::<Vec<_>>()
        .join(" ")
}

fn framing(root: &Path, titles: &[String], present: &[usize], rng: &mut SynthRng) -> Result<()> {
    let mut manifest = String::from("page\tplatform\tstyle\tpath\n");
    for (k, &i) in present.iter().take(12).enumerate() {
        let t = &titles[i];
        let file = slug(t).replace('%', "");
        let laud: f64 = rng.random_range(0.0..0.4);
        let conflict: f64 = rng.random_range(0.0..0.4);
        let n_human = if k == 0 { 2 } else { rng.random_range(6..10) };
        let n_gen = if k == 1 { 2 } else { rng.random_range(6..10) };
        let human = format!("{}\n\n== History ==\n{t} has a long history.\n", lead(rng, t, n_human, laud, conflict));
        let generative = format!(
            "{}\n\n## Background\n\n{t} is discussed further below.\n",
            lead(rng, t, n_gen, (laud + 0.15).min(0.6), conflict)
        );
        writeln!(manifest, "{t}\thuman\twikitext\tarticles/{file}.wiki").unwrap();
        writeln!(manifest, "{t}\tgenerative\tmarkdown\tarticles/{file}.md").unwrap();
        put(root, &format!("framing/articles/{file}.wiki"), &human)?;
        put(root, &format!("framing/articles/{file}.md"), &generative)?;
    }
    put(root, "framing/manifest.tsv", &manifest)
}
