use chrono::{DateTime, Utc};
use serde::Serialize;
use serde_json::{Map, Value};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct EditRequest {
    pub slug: String,
    pub author_id: String,
    pub created_at: DateTime<Utc>,
    pub proposed_change: String,
    pub reviewer_feedback: String,
    /// Review outcome when the endpoint reports one.
    pub status: Option<String>,
}

/// Parses one list-edit-requests-by-slug response:
/// `{"slug": ..., "edit_requests": [{"author_id", "created_at", "proposed_change", "reviewer_feedback"}]}`.
/// camelCase spellings are accepted. `created_at` is RFC 3339 or Unix seconds.
pub fn parse_edit_requests(payload: &str) -> Result<Vec<EditRequest>> {
    let doc: Value = serde_json::from_str(payload).map_err(|e| Error::parse(format!("edit requests: {e}")))?;
    let obj = doc.as_object().ok_or_else(|| Error::parse("edit requests: expected an object"))?;
    let slug = string_field(obj, &["slug"]).ok_or_else(|| Error::parse("slug absent"))?;
    let list = field(obj, &["edit_requests", "editRequests"])
        .ok_or_else(|| Error::parse("edit_requests absent"))?
        .as_array()
        .ok_or_else(|| Error::parse("edit_requests is not a list"))?;

    list.iter()
        .enumerate()
        .map(|(i, item)| {
            let ctx = |msg: &str| Error::parse(format!("edit request {i} of {slug:?}: {msg}"));
            let item = item.as_object().ok_or_else(|| ctx("expected an object"))?;
            let author_id = string_field(item, &["author_id", "authorId"]).ok_or_else(|| ctx("author_id absent"))?;
            let created_at = field(item, &["created_at", "createdAt"]).ok_or_else(|| ctx("created_at absent"))?;
            let created_at = timestamp(created_at).ok_or_else(|| ctx("created_at unparseable"))?;
            let proposed_change =
                string_field(item, &["proposed_change", "proposedChange"]).ok_or_else(|| ctx("proposed_change absent"))?;
            Ok(EditRequest {
                slug: slug.clone(),
                author_id,
                created_at,
                proposed_change,
                reviewer_feedback: string_field(item, &["reviewer_feedback", "reviewerFeedback"]).unwrap_or_default(),
                status: string_field(item, &["status"]),
            })
        })
        .collect()
}

fn field<'a>(obj: &'a Map<String, Value>, names: &[&str]) -> Option<&'a Value> {
    names.iter().find_map(|n| obj.get(*n)).filter(|v| !v.is_null())
}

/// Strings pass through; numeric ids are rendered.
fn string_field(obj: &Map<String, Value>, names: &[&str]) -> Option<String> {
    match field(obj, names)? {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        _ => None,
    }
}

fn timestamp(v: &Value) -> Option<DateTime<Utc>> {
    match v {
        Value::String(s) => DateTime::parse_from_rfc3339(s).ok().map(|t| t.with_timezone(&Utc)),
        Value::Number(n) => DateTime::from_timestamp(n.as_i64()?, 0),
        _ => None,
    }
}
