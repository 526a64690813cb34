//! Delimited-file staging between subcommands.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use csv::{QuoteStyle, ReaderBuilder, StringRecord, WriterBuilder};

use crate::error::{CliError, Result};

/// Shortest representation that reads back to the same value.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{x}")
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    if b { "1" } else { "0" }.to_string()
}

fn delimiter(path: &Path) -> u8 {
    match path.extension().and_then(|e| e.to_str()) {
        Some("tsv") => b'\t',
        _ => b',',
    }
}

/// Writes a header and rows, choosing the delimiter from the extension.
/// The file appears atomically: rows go to a temporary sibling that is
/// renamed over the target.
pub fn write_table<S: AsRef<str>>(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Result<()> {
    let mut w = WriterBuilder::new().delimiter(delimiter(path)).quote_style(QuoteStyle::Necessary).from_writer(Vec::new());
    let bad = |e: csv::Error| CliError::input(path, e.to_string());
    w.write_record(header).map_err(bad)?;
    for row in rows {
        let row: Vec<&str> = row.iter().map(AsRef::as_ref).collect();
        if row.len() != header.len() {
            return Err(CliError::input(path, format!("row of {} fields for {} columns", row.len(), header.len())));
        }
        w.write_record(&row).map_err(bad)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::input(path, e.to_string()))?;
    write_atomic(path, &bytes)
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// A staged table loaded in full, with columns addressed by name.
#[derive(Debug)]
pub struct Table {
    pub path: PathBuf,
    columns: HashMap<String, usize>,
    pub rows: Vec<StringRecord>,
}

impl Table {
    /// Reads an artifact written by `producer`; a missing file names it.
    pub fn read(path: &Path, producer: &'static str) -> Result<Table> {
        if !path.is_file() {
            return Err(CliError::MissingInput { path: path.to_path_buf(), producer });
        }
        Table::read_input(path)
    }

    /// Reads a user-supplied input file.
    pub fn read_input(path: &Path) -> Result<Table> {
        let mut r = ReaderBuilder::new()
            .delimiter(delimiter(path))
            .comment(Some(b'#'))
            .from_path(path)
            .map_err(|e| CliError::input(path, e.to_string()))?;
        let header = r.headers().map_err(|e| CliError::input(path, e.to_string()))?.clone();
        let columns = header.iter().enumerate().map(|(i, h)| (h.trim().to_string(), i)).collect();
        let rows = r.records().collect::<Result<Vec<_>, _>>().map_err(|e| CliError::input(path, e.to_string()))?;
        Ok(Table { path: path.to_path_buf(), columns, rows })
    }

    pub fn col(&self, name: &str) -> Result<usize> {
        self.columns.get(name).copied().ok_or_else(|| CliError::input(&self.path, format!("no column {name:?}")))
    }

    pub fn parse<T: std::str::FromStr>(&self, row: &StringRecord, col: usize) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        let raw = &row[col];
        raw.trim().parse().map_err(|e| {
            let line = row.position().map_or(0, |p| p.line());
            CliError::input(&self.path, format!("line {line}: {raw:?}: {e}"))
        })
    }

    pub fn parse_flag(&self, row: &StringRecord, col: usize) -> Result<bool> {
        match row[col].trim() {
            "1" | "true" => Ok(true),
            "0" | "false" => Ok(false),
            other => Err(CliError::input(&self.path, format!("expected 0 or 1, got {other:?}"))),
        }
    }
}
