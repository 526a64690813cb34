//! JSON-in, JSON-out bindings for the browser demo. Every function returns
//! an object with either the result fields or a single `error` string.

use encyclodiff::complexity::{fitness_complexity, BipartiteMatrix};
use encyclodiff::features::{discretize_iterative_mean, gini_index};
use encyclodiff::stats::spearman;
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

fn respond(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn numbers(input: &str) -> Result<Vec<f64>, String> {
    serde_json::from_str(input).map_err(|e| format!("expected a JSON array of numbers: {e}"))
}

/// `values`: JSON array of non-negative counts. Gini is `null` when undefined.
#[wasm_bindgen]
pub fn discretize(values: &str) -> String {
    respond((|| {
        let v = numbers(values)?;
        let levels = discretize_iterative_mean(&v).map_err(|e| e.to_string())?;
        Ok(json!({ "levels": levels, "gini": gini_index(&v).ok() }))
    })())
}

/// `rows`: JSON array of equal-length 0/1 rows, editors by pages.
#[wasm_bindgen]
pub fn fitness_complexity_of(rows: &str, tol: f64, max_iter: u32) -> String {
    respond((|| {
        let rows: Vec<Vec<u8>> = serde_json::from_str(rows).map_err(|e| format!("expected a JSON 0/1 matrix: {e}"))?;
        let dense: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&c| c != 0).collect()).collect();
        let m = BipartiteMatrix::from_dense(&dense).map_err(|e| e.to_string())?;
        let r = fitness_complexity(&m, tol, max_iter as usize).map_err(|e| e.to_string())?;
        serde_json::to_value(r).map_err(|e| e.to_string())
    })())
}

#[wasm_bindgen]
pub fn spearman_of(x: &str, y: &str) -> String {
    respond((|| {
        let r = spearman(&numbers(x)?, &numbers(y)?).map_err(|e| e.to_string())?;
        serde_json::to_value(r).map_err(|e| e.to_string())
    })())
}
