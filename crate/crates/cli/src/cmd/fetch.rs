use std::fs;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::{Duration, Instant};

use clap::Args;
use encyclodiff::ingest::{parse_sitemap, slug_from_url, Sitemap};
use encyclodiff::Error;
use percent_encoding::{utf8_percent_encode, NON_ALPHANUMERIC};

use crate::config::{pick, Settings};
use crate::error::{CliError, Result};
use crate::layout::Layout;
use crate::table::{write_atomic, write_table};

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Sitemap (or sitemap index) URL, or a local XML file.
    #[arg(long)]
    sitemap: Option<String>,
    /// Edit-request URL template containing `{slug}`.
    #[arg(long)]
    edit_requests_url: Option<String>,
    /// Minimum milliseconds between request starts.
    #[arg(long)]
    delay_ms: Option<u64>,
    #[arg(long)]
    max_in_flight: Option<usize>,
    /// Stop after this many pages.
    #[arg(long)]
    limit: Option<usize>,
    #[arg(long)]
    timeout_secs: Option<u64>,
}

/// Spaces request starts at least `delay` apart across all workers.
struct Throttle {
    delay: Duration,
    next: Mutex<Instant>,
}

impl Throttle {
    fn wait(&self) {
        let start = {
            let mut next = self.next.lock().expect("throttle lock");
            let start = (*next).max(Instant::now());
            *next = start + self.delay;
            start
        };
        if let Some(d) = start.checked_duration_since(Instant::now()) {
            thread::sleep(d);
        }
    }
}

struct Client {
    agent: ureq::Agent,
    throttle: Throttle,
}

impl Client {
    fn get(&self, url: &str) -> std::result::Result<String, Error> {
        self.throttle.wait();
        let transport = |e: ureq::Error| Error::Transport(format!("{url}: {e}"));
        let mut response = self.agent.get(url).call().map_err(transport)?;
        response.body_mut().with_config().limit(64 << 20).read_to_string().map_err(transport)
    }

    fn document(&self, location: &str) -> Result<String> {
        if location.starts_with("http://") || location.starts_with("https://") {
            Ok(self.get(location)?)
        } else {
            fs::read_to_string(location).map_err(|e| CliError::io(location, e))
        }
    }
}

fn safe_slug(slug: &str) -> bool {
    !slug.is_empty() && !slug.starts_with('.') && !slug.contains(['/', '\\', '\0'])
}

pub fn run(layout: &Layout, settings: &Settings, args: FetchArgs) -> Result<()> {
    let sitemap = args.sitemap.or(settings.sitemap.clone()).ok_or_else(|| CliError::usage("fetch needs --sitemap"))?;
    let template = args.edit_requests_url.or(settings.edit_requests_url.clone());
    if template.as_deref().is_some_and(|t| !t.contains("{slug}")) {
        return Err(CliError::usage("--edit-requests-url must contain {slug}"));
    }
    let timeout = Duration::from_secs(pick(args.timeout_secs, settings.timeout_secs, 30));
    let client = Client {
        agent: ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into(),
        throttle: Throttle {
            delay: Duration::from_millis(pick(args.delay_ms, settings.delay_ms, 1000)),
            next: Mutex::new(Instant::now()),
        },
    };
    let limit = args.limit.or(settings.limit).unwrap_or(usize::MAX);

    // depth-first over nested indexes, children in listed order
    let mut pending = vec![sitemap];
    let mut urls = Vec::new();
    while let Some(location) = pending.pop() {
        if urls.len() >= limit {
            break;
        }
        match parse_sitemap(&client.document(&location)?)? {
            Sitemap::Pages(locs) => urls.extend(locs),
            Sitemap::Index(children) => pending.extend(children.into_iter().rev()),
        }
    }
    let mut errors: Vec<Vec<String>> = Vec::new();
    let mut targets = Vec::new();
    for url in urls {
        match slug_from_url(&url) {
            Some(slug) if safe_slug(&slug) => targets.push((slug, url)),
            _ => errors.push(vec![String::new(), url, "no usable slug in URL".into()]),
        }
    }
    targets.sort();
    targets.dedup_by(|a, b| a.0 == b.0);
    targets.truncate(limit);

    let pages_dir = layout.grok_pages();
    let edits_dir = layout.edit_requests();
    fs::create_dir_all(&pages_dir).map_err(|e| CliError::io(&pages_dir, e))?;
    if template.is_some() {
        fs::create_dir_all(&edits_dir).map_err(|e| CliError::io(&edits_dir, e))?;
    }

    let next = AtomicUsize::new(0);
    let log = Mutex::new((Vec::new(), errors));
    let workers = pick(args.max_in_flight, settings.max_in_flight, 2).clamp(1, targets.len().max(1));
    let fetch_one = |url: &str, path: &Path| -> std::result::Result<usize, String> {
        let body = client.get(url).map_err(|e| e.to_string())?;
        if body.trim().is_empty() {
            return Err("empty response".into());
        }
        write_atomic(path, body.as_bytes()).map_err(|e| e.to_string())?;
        Ok(body.len())
    };
    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| {
                while let Some((slug, url)) = targets.get(next.fetch_add(1, Ordering::Relaxed)) {
                    let mut done = Vec::new();
                    let mut failed = Vec::new();
                    let page_path = pages_dir.join(format!("{slug}.html"));
                    // existing snapshots are kept, so an interrupted walk resumes
                    if !page_path.exists() {
                        match fetch_one(url, &page_path) {
                            Ok(bytes) => done.push(vec![slug.clone(), url.clone(), chrono::Utc::now().timestamp().to_string(), bytes.to_string()]),
                            Err(e) => failed.push(vec![slug.clone(), url.clone(), e]),
                        }
                    }
                    if let Some(t) = &template {
                        let edit_url = t.replace("{slug}", &utf8_percent_encode(slug, NON_ALPHANUMERIC).to_string());
                        let edit_path = edits_dir.join(format!("{slug}.json"));
                        if !edit_path.exists() {
                            if let Err(e) = fetch_one(&edit_url, &edit_path) {
                                failed.push(vec![slug.clone(), edit_url, e]);
                            }
                        }
                    }
                    let mut log = log.lock().expect("log lock");
                    log.0.extend(done);
                    log.1.extend(failed);
                }
            });
        }
    });

    let (mut done, mut failed) = log.into_inner().expect("log lock");
    done.sort();
    failed.sort();
    let root = pages_dir.parent().unwrap_or(&pages_dir).to_path_buf();
    eprintln!("fetch: {} targets, {} downloaded, {} failures", targets.len(), done.len(), failed.len());
    write_table(&root.join("fetch_log.tsv"), &["slug", "url", "fetched_at", "bytes"], done)?;
    write_table(&root.join("fetch_errors.tsv"), &["slug", "url", "error"], failed)?;
    Ok(())
}
