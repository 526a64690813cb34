use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::{Error, Result};

pub const SENTENCE_PLACEHOLDER: &str = "{LEAD SECTION SENTENCE}";

/// Per-sentence annotation prompt. The sentence replaces the placeholder.
pub const FRAMING_PROMPT_TEMPLATE: &str = "You are an automated text analysis system.

Task:

Analyze the framing of the provided text snippet. Do NOT evaluate factual accuracy, topic, or intent beyond framing.

Dimensions to evaluate:
- laudatory_framing: Does the text praise, admire, or glorify something or someone?
- conflict_controversy: Does the text focus on disputes, disagreements, or controversies, rather than merely mentioning them?

Output:

Return only a valid JSON assigning 1 if the snippet exhibits the dimension, or 0 otherwise.

Text: {LEAD SECTION SENTENCE}";

pub fn framing_prompt(sentence: &str) -> String {
    FRAMING_PROMPT_TEMPLATE.replace(SENTENCE_PLACEHOLDER, sentence)
}

/// JSON schema passed as the structured-output format.
pub fn response_schema() -> Value {
    json!({
        "type": "object",
        "properties": {
            "laudatory_framing": { "type": "integer", "enum": [0, 1] },
            "conflict_controversy": { "type": "integer", "enum": [0, 1] }
        },
        "required": ["laudatory_framing", "conflict_controversy"],
        "additionalProperties": false
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FramingLabels {
    pub laudatory: bool,
    pub conflict: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SentenceAnnotation {
    pub sentence: String,
    /// `None` when every attempt returned a non-conforming response.
    pub labels: Option<FramingLabels>,
}

impl SentenceAnnotation {
    pub fn is_scored(&self) -> bool {
        self.labels.is_some()
    }
}

/// Parses a model response: a JSON object with exactly the two label keys,
/// each the integer 0 or 1.
pub fn parse_labels(content: &str) -> Option<FramingLabels> {
    let value: Value = serde_json::from_str(content.trim()).ok()?;
    let obj = value.as_object()?;
    if obj.len() != 2 {
        return None;
    }
    let bit = |key: &str| match obj.get(key)?.as_u64()? {
        0 => Some(false),
        1 => Some(true),
        _ => None,
    };
    Some(FramingLabels { laudatory: bit("laudatory_framing")?, conflict: bit("conflict_controversy")? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnnotationRequest {
    pub model: String,
    pub prompt: String,
    pub temperature: f64,
    pub schema: Value,
}

/// A chat-completion endpoint returning the raw message content.
pub trait AnnotationBackend: Sync {
    /// Transport failures must be reported as [`Error::Transport`].
    fn complete(&self, request: &AnnotationRequest) -> Result<String>;
}

impl<B: AnnotationBackend + ?Sized> AnnotationBackend for &B {
    fn complete(&self, request: &AnnotationRequest) -> Result<String> {
        (**self).complete(request)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatorConfig {
    pub model: String,
    /// Attempts per sentence before it is marked unscored.
    pub attempts: usize,
    pub concurrency: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig { model: super::DEFAULT_MODEL.to_string(), attempts: 3, concurrency: 4, cache_dir: None }
    }
}

/// On-disk cache of scored sentences, one JSON file per key. Keys hash the
/// model name and the full prompt, which embeds the sentence.
#[derive(Debug, Clone)]
pub struct SentenceCache {
    dir: PathBuf,
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

impl SentenceCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(SentenceCache { dir })
    }

    pub fn key(model: &str, prompt: &str) -> String {
        let mut h = Sha256::new();
        h.update(model.as_bytes());
        h.update([0u8]);
        h.update(prompt.as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Option<FramingLabels> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        serde_json::from_str(&text).ok()
    }

    /// Writes through a uniquely named temporary file and renames it into
    /// place, so concurrent writers never expose a partial entry.
    pub fn put(&self, key: &str, labels: FramingLabels) -> Result<()> {
        let tmp = self.dir.join(format!(
            ".{key}.{}.{}.tmp",
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(serde_json::to_string(&labels).expect("labels serialize").as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(&tmp, self.path(key))?;
        Ok(())
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }
}

fn annotate_one(backend: &dyn AnnotationBackend, config: &AnnotatorConfig, cache: Option<&SentenceCache>, sentence: &str) -> Result<SentenceAnnotation> {
    let prompt = framing_prompt(sentence);
    let key = SentenceCache::key(&config.model, &prompt);
    if let Some(labels) = cache.and_then(|c| c.get(&key)) {
        return Ok(SentenceAnnotation { sentence: sentence.to_string(), labels: Some(labels) });
    }
    let request = AnnotationRequest { model: config.model.clone(), prompt, temperature: 0.0, schema: response_schema() };
    for _ in 0..config.attempts.max(1) {
        let content = backend.complete(&request)?;
        if let Some(labels) = parse_labels(&content) {
            if let Some(c) = cache {
                c.put(&key, labels)?;
            }
            return Ok(SentenceAnnotation { sentence: sentence.to_string(), labels: Some(labels) });
        }
    }
    Ok(SentenceAnnotation { sentence: sentence.to_string(), labels: None })
}

/// Labels each sentence with one request (temperature 0), retrying
/// non-conforming responses. Scored sentences are served from and written to
/// the cache when one is configured, so an interrupted run resumes where it
/// stopped. Up to `config.concurrency` requests are in flight at once; the
/// output order follows the input.
pub fn annotate_sentences(backend: &dyn AnnotationBackend, config: &AnnotatorConfig, sentences: &[String]) -> Result<Vec<SentenceAnnotation>> {
    if sentences.is_empty() {
        return Ok(Vec::new());
    }
    let cache = config.cache_dir.as_ref().map(SentenceCache::open).transpose()?;
    let workers = config.concurrency.clamp(1, sentences.len());
    let next = AtomicUsize::new(0);
    let failed = AtomicBool::new(false);
    let results: Mutex<Vec<Option<Result<SentenceAnnotation>>>> = Mutex::new((0..sentences.len()).map(|_| None).collect());

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                if failed.load(Ordering::Relaxed) {
                    break;
                }
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(sentence) = sentences.get(i) else {
                    break;
                };
                let outcome = annotate_one(backend, config, cache.as_ref(), sentence);
                if outcome.is_err() {
                    failed.store(true, Ordering::Relaxed);
                }
                results.lock().expect("result lock")[i] = Some(outcome);
            });
        }
    });

    let results = results.into_inner().expect("result lock");
    let mut out = Vec::with_capacity(sentences.len());
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Some(Ok(a)) => out.push(a),
            Some(Err(e)) => return Err(e),
            None => return Err(Error::Transport(format!("annotation aborted before sentence {i}"))),
        }
    }
    Ok(out)
}
