#![allow(dead_code)]

use std::collections::BTreeMap;
use std::io::{BufRead, BufReader, Read, Write};
use std::net::{TcpListener, TcpStream};
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/corpus")
}

pub fn run(data: &Path, out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_encyclodiff"))
        .arg("--data")
        .arg(data)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("spawn encyclodiff")
}

pub fn ok(data: &Path, out: &Path, args: &[&str]) {
    let o = run(data, out, args);
    assert!(o.status.success(), "{args:?} failed: {}", String::from_utf8_lossy(&o.stderr));
}

/// A chat endpoint speaking the Ollama wire format. Labels follow keywords
/// in the sentence: "praised"/"acclaim"/"celebrated" → laudatory, "dispute"/"controversy" → conflict,
/// and "garbled" sentences always get a response missing a key.
pub struct MockChat {
    pub url: String,
    pub requests: Arc<AtomicUsize>,
}

pub fn mock_chat() -> MockChat {
    let listener = TcpListener::bind("127.0.0.1:0").expect("bind");
    let url = format!("http://{}", listener.local_addr().unwrap());
    let requests = Arc::new(AtomicUsize::new(0));
    let counter = requests.clone();
    thread::spawn(move || {
        for stream in listener.incoming().flatten() {
            let counter = counter.clone();
            thread::spawn(move || {
                let _ = serve(stream, &counter);
            });
        }
    });
    MockChat { url, requests }
}

fn serve(stream: TcpStream, counter: &AtomicUsize) -> std::io::Result<()> {
    let mut reader = BufReader::new(stream.try_clone()?);
    let mut length = 0;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line)? == 0 {
            return Ok(());
        }
        let line = line.trim_end();
        if line.is_empty() {
            break;
        }
        if let Some((k, v)) = line.split_once(':') {
            if k.eq_ignore_ascii_case("content-length") {
                length = v.trim().parse().unwrap_or(0);
            }
        }
    }
    let mut body = vec![0; length];
    reader.read_exact(&mut body)?;
    counter.fetch_add(1, Ordering::SeqCst);
    let request: serde_json::Value = serde_json::from_slice(&body).unwrap_or_default();
    let prompt = request.pointer("/messages/0/content").and_then(|v| v.as_str()).unwrap_or("");
    let text = prompt.rsplit("Text: ").next().unwrap_or("");
    let has = |words: &[&str]| u8::from(words.iter().any(|w| text.contains(w)));
    let labels = if text.contains("garbled") {
        // missing key: never a valid answer
        r#"{"laudatory_framing":1}"#.to_string()
    } else {
        format!(
        r#"{{"laudatory_framing":{},"conflict_controversy":{}}}"#,
        has(&["praised", "acclaim", "celebrated"]),
        has(&["dispute", "controversy"])
        )
    };
    let doc = serde_json::json!({ "model": "mock", "message": { "role": "assistant", "content": labels }, "done": true });
    let payload = doc.to_string();
    let mut stream = stream;
    write!(
        stream,
        "HTTP/1.1 200 OK\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n\r\n{payload}",
        payload.len()
    )?;
    stream.flush()
}

/// Every stage from ingest to report over `data`, into `out`.
pub fn full_pipeline(data: &Path, out: &Path, endpoint: &str) {
    for args in [
        vec!["ingest"],
        vec!["features"],
        vec!["fit-inclusion", "--ridge"],
        vec!["fit-rewrite", "--ridge"],
        vec!["complexity"],
        vec!["narrative"],
        vec!["framing", "--endpoint", endpoint],
        vec!["report"],
    ] {
        ok(data, out, &args);
    }
}

/// Relative path → bytes of every file under `root`.
pub fn snapshot(root: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![root.to_path_buf()];
    while let Some(dir) = stack.pop() {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf(), std::fs::read(&path).unwrap());
            }
        }
    }
    out
}
