use std::time::Duration;

use serde_json::{json, Value};

use super::annotate::{AnnotationBackend, AnnotationRequest};
use crate::{Error, Result};

/// Request/response shape of the chat endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WireFormat {
    /// `POST {base}/api/chat` with a JSON-schema `format` field.
    Ollama,
    /// `POST {base}/v1/chat/completions` with `response_format`.
    OpenAi,
}

impl WireFormat {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ollama" => Ok(WireFormat::Ollama),
            "openai" => Ok(WireFormat::OpenAi),
            other => Err(Error::parse(format!("unknown wire format {other:?}"))),
        }
    }

    fn path(self) -> &'static str {
        match self {
            WireFormat::Ollama => "/api/chat",
            WireFormat::OpenAi => "/v1/chat/completions",
        }
    }

    pub fn body(self, request: &AnnotationRequest) -> Value {
        let messages = json!([{ "role": "user", "content": request.prompt }]);
        match self {
            WireFormat::Ollama => json!({
                "model": request.model,
                "messages": messages,
                "stream": false,
                "format": request.schema,
                "options": { "temperature": request.temperature },
            }),
            WireFormat::OpenAi => json!({
                "model": request.model,
                "messages": messages,
                "temperature": request.temperature,
                "response_format": {
                    "type": "json_schema",
                    "json_schema": { "name": "framing", "strict": true, "schema": request.schema },
                },
            }),
        }
    }

    /// Message content of a response document. A document without the
    /// expected content field yields an empty string, which fails validation
    /// and is retried like any other non-conforming answer.
    pub fn content(self, response: &Value) -> String {
        let content = match self {
            WireFormat::Ollama => response.pointer("/message/content"),
            WireFormat::OpenAi => response.pointer("/choices/0/message/content"),
        };
        content.and_then(Value::as_str).unwrap_or_default().to_string()
    }
}

pub struct HttpBackend {
    agent: ureq::Agent,
    url: String,
    format: WireFormat,
}

impl HttpBackend {
    pub fn new(base_url: &str, format: WireFormat, timeout: Duration) -> Self {
        let agent = ureq::Agent::config_builder().timeout_global(Some(timeout)).build().into();
        HttpBackend { agent, url: format!("{}{}", base_url.trim_end_matches('/'), format.path()), format }
    }

    pub fn url(&self) -> &str {
        &self.url
    }
}

impl AnnotationBackend for HttpBackend {
    fn complete(&self, request: &AnnotationRequest) -> Result<String> {
        let transport = |e: ureq::Error| Error::Transport(format!("{}: {e}", self.url));
        let mut response = self.agent.post(&self.url).send_json(self.format.body(request)).map_err(transport)?;
        let doc: Value = response.body_mut().read_json().map_err(transport)?;
        Ok(self.format.content(&doc))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> AnnotationRequest {
        AnnotationRequest { model: "m".into(), prompt: "p".into(), temperature: 0.0, schema: json!({"type": "object"}) }
    }

    #[test]
    fn ollama_body_and_content() {
        let body = WireFormat::Ollama.body(&request());
        assert_eq!(body["options"]["temperature"], 0.0);
        assert_eq!(body["format"]["type"], "object");
        assert_eq!(body["stream"], false);
        let resp = json!({"message": {"role": "assistant", "content": "{}"}});
        assert_eq!(WireFormat::Ollama.content(&resp), "{}");
        assert_eq!(WireFormat::Ollama.content(&json!({})), "");
    }

    #[test]
    fn openai_body_and_content() {
        let body = WireFormat::OpenAi.body(&request());
        assert_eq!(body["temperature"], 0.0);
        assert_eq!(body["response_format"]["json_schema"]["schema"]["type"], "object");
        let resp = json!({"choices": [{"message": {"content": "x"}}]});
        assert_eq!(WireFormat::OpenAi.content(&resp), "x");
    }

    #[test]
    fn unreachable_endpoint_is_transport() {
        let backend = HttpBackend::new("http://127.0.0.1:1", WireFormat::Ollama, Duration::from_secs(2));
        assert!(backend.complete(&request()).unwrap_err().is_transport());
    }
}
