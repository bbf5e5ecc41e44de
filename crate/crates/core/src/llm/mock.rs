//! Scripted responder for offline runs.
//!
//! A script is JSON:
//!
//! ```json
//! {
//!   "timing": "virtual",
//!   "rules": [
//!     {
//!       "query": "move the X1 to the right",
//!       "strategy": "cga",
//!       "failures": 2,
//!       "responses": [{"delay_ms": 250, "body": {"objects": []}}]
//!     }
//!   ]
//! }
//! ```
//!
//! Rules match on the templated query and, optionally, the strategy; a rule
//! without `query` matches everything. The n-th request hitting a rule gets
//! the failure body while `n < failures`, then `responses[n - failures]`,
//! repeating the last response once the list runs out.

use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::prompt::query_line;
use super::transport::{ChatRequest, LlmTransport, Reply, TransportError};
use super::StrategyKind;

pub const DEFAULT_FAILURE_BODY: &str = "I am not able to produce a transformation for this request.";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MockTiming {
    /// Delays are reported as latency without sleeping.
    #[default]
    Virtual,
    /// Delays are slept for real.
    Sleep,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MockReply {
    #[serde(default)]
    pub delay_ms: f64,
    /// A string is sent verbatim; any other JSON value is serialized.
    #[serde(default)]
    pub body: Value,
    /// Fail at the transport level instead of answering.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transport_error: Option<String>,
}

impl MockReply {
    pub fn text(&self) -> String {
        match &self.body {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MockRule {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategy: Option<StrategyKind>,
    #[serde(default)]
    pub failures: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure_body: Option<String>,
    #[serde(default)]
    pub failure_delay_ms: f64,
    pub responses: Vec<MockReply>,
}

impl MockRule {
    fn matches(&self, query: &str, strategy: StrategyKind) -> bool {
        self.query.as_deref().is_none_or(|q| q == query) && self.strategy.is_none_or(|s| s == strategy)
    }

    fn reply_for(&self, n: usize) -> MockReply {
        if n < self.failures {
            return MockReply {
                delay_ms: self.failure_delay_ms,
                body: Value::String(
                    self.failure_body
                        .clone()
                        .unwrap_or_else(|| DEFAULT_FAILURE_BODY.to_owned()),
                ),
                transport_error: None,
            };
        }
        match self.responses.get(n - self.failures).or(self.responses.last()) {
            Some(r) => r.clone(),
            None => MockReply {
                body: Value::String(DEFAULT_FAILURE_BODY.to_owned()),
                ..MockReply::default()
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MockScript {
    #[serde(default)]
    pub timing: MockTiming,
    pub rules: Vec<MockRule>,
}

#[derive(Debug, thiserror::Error)]
pub enum MockScriptError {
    #[error("cannot read mock script: {0}")]
    Io(#[from] std::io::Error),
    #[error("invalid mock script: {0}")]
    Json(#[from] serde_json::Error),
}

impl MockScript {
    pub fn from_json(text: &str) -> Result<Self, MockScriptError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self, MockScriptError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Debug)]
pub struct MockTransport {
    script: MockScript,
    hits: Mutex<Vec<usize>>,
}

impl MockTransport {
    pub fn new(script: MockScript) -> Self {
        let hits = Mutex::new(vec![0; script.rules.len()]);
        Self { script, hits }
    }

    /// One rule answering every query with `body` immediately.
    pub fn always(body: impl Into<String>) -> Self {
        Self::new(MockScript {
            timing: MockTiming::Virtual,
            rules: vec![MockRule {
                responses: vec![MockReply {
                    body: Value::String(body.into()),
                    ..MockReply::default()
                }],
                ..MockRule::default()
            }],
        })
    }

    pub fn script(&self) -> &MockScript {
        &self.script
    }

    /// Requests served so far, summed over rules.
    pub fn calls(&self) -> usize {
        self.hits.lock().expect("mock counter").iter().sum()
    }

    pub fn reset(&self) {
        self.hits.lock().expect("mock counter").fill(0);
    }
}

impl LlmTransport for MockTransport {
    fn send(&self, request: &ChatRequest) -> Result<Reply, TransportError> {
        let query = query_line(&request.prompt).unwrap_or_default();
        let index = self
            .script
            .rules
            .iter()
            .position(|r| r.matches(query, request.strategy))
            .ok_or_else(|| TransportError::NoRule(query.to_owned()))?;
        let n = {
            let mut hits = self.hits.lock().expect("mock counter");
            let n = hits[index];
            hits[index] += 1;
            n
        };
        let reply = self.script.rules[index].reply_for(n);
        let delay = Duration::from_secs_f64(reply.delay_ms.max(0.0) / 1000.0);
        let simulated_latency = match self.script.timing {
            MockTiming::Virtual => Some(delay),
            MockTiming::Sleep => {
                std::thread::sleep(delay);
                None
            }
        };
        if let Some(msg) = reply.transport_error {
            return Err(TransportError::Scripted(msg));
        }
        Ok(Reply {
            text: reply.text(),
            simulated_latency,
        })
    }
}
