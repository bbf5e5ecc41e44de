//! Transport for OpenAI-compatible chat completion endpoints.

use std::time::Duration;

use serde_json::{json, Value};

use super::transport::{ChatRequest, LlmTransport, Reply, TransportError};

pub const API_KEY_VAR: &str = "LLM_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct LiveConfig {
    /// Base URL up to and excluding `/chat/completions`.
    pub base_url: String,
    pub model: String,
    pub temperature: f64,
    pub timeout: Duration,
}

impl Default for LiveConfig {
    fn default() -> Self {
        Self {
            base_url: "https://api.openai.com/v1".into(),
            model: "gpt-4o".into(),
            temperature: 0.0,
            timeout: Duration::from_secs(60),
        }
    }
}

pub struct LiveTransport {
    config: LiveConfig,
    api_key: String,
    agent: ureq::Agent,
}

impl std::fmt::Debug for LiveTransport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LiveTransport")
            .field("config", &self.config)
            .finish_non_exhaustive()
    }
}

impl LiveTransport {
    /// Reads the key from `LLM_API_KEY`.
    pub fn from_env(config: LiveConfig) -> Result<Self, TransportError> {
        let key = std::env::var(API_KEY_VAR).map_err(|_| TransportError::MissingApiKey(API_KEY_VAR.into()))?;
        Ok(Self::new(config, key))
    }

    pub fn new(config: LiveConfig, api_key: impl Into<String>) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(config.timeout))
            .http_status_as_error(false)
            .build()
            .into();
        Self {
            config,
            api_key: api_key.into(),
            agent,
        }
    }

    pub fn request_body(&self, request: &ChatRequest) -> Value {
        json!({
            "model": self.config.model,
            "temperature": self.config.temperature,
            "messages": [{"role": "user", "content": request.prompt}],
        })
    }
}

/// The assistant text of a chat completion answer.
pub fn completion_text(body: &Value) -> Result<String, TransportError> {
    body.pointer("/choices/0/message/content")
        .and_then(Value::as_str)
        .map(str::to_owned)
        .ok_or_else(|| TransportError::Decode("missing choices[0].message.content".into()))
}

impl LlmTransport for LiveTransport {
    fn send(&self, request: &ChatRequest) -> Result<Reply, TransportError> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let mut resp = self
            .agent
            .post(&url)
            .header("Authorization", &format!("Bearer {}", self.api_key))
            .send_json(self.request_body(request))
            .map_err(|e| TransportError::Http(e.to_string()))?;
        let status = resp.status().as_u16();
        if !(200..300).contains(&status) {
            let body = resp.body_mut().read_to_string().unwrap_or_default();
            return Err(TransportError::Status { status, body });
        }
        let body: Value = resp
            .body_mut()
            .read_json()
            .map_err(|e| TransportError::Decode(e.to_string()))?;
        Ok(Reply::new(completion_text(&body)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm::StrategyKind;

    #[test]
    fn request_is_deterministic_by_default() {
        let t = LiveTransport::new(LiveConfig::default(), "k");
        let body = t.request_body(&ChatRequest {
            strategy: StrategyKind::Cga,
            prompt: "hello".into(),
        });
        assert_eq!(body["temperature"], 0.0);
        assert_eq!(body["messages"][0]["content"], "hello");
    }

    #[test]
    fn completion_text_extraction() {
        let body = json!({"choices": [{"message": {"role": "assistant", "content": "{}"}}]});
        assert_eq!(completion_text(&body).unwrap(), "{}");
        assert!(matches!(completion_text(&json!({})), Err(TransportError::Decode(_))));
    }

    #[test]
    fn unreachable_endpoint_is_a_transport_error() {
        let config = LiveConfig {
            base_url: "http://127.0.0.1:9".into(),
            timeout: Duration::from_secs(2),
            ..LiveConfig::default()
        };
        let t = LiveTransport::new(config, "k");
        let err = t
            .send(&ChatRequest {
                strategy: StrategyKind::Cga,
                prompt: "x".into(),
            })
            .unwrap_err();
        assert!(matches!(err, TransportError::Http(_)));
    }
}
