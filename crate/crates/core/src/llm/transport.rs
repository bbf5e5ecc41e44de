use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::prompt::ObjectContext;
use super::response::{parse_response, ParsedResponse, ResponseError};
use super::StrategyKind;

/// Attempts per request, counting the first one.
pub const DEFAULT_MAX_ATTEMPTS: u32 = 5;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChatRequest {
    pub strategy: StrategyKind,
    pub prompt: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub text: String,
    /// Set by transports that simulate time instead of spending it. When
    /// present it replaces the measured wall-clock for this attempt.
    pub simulated_latency: Option<Duration>,
}

impl Reply {
    pub fn new(text: impl Into<String>) -> Self {
        Self {
            text: text.into(),
            simulated_latency: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TransportError {
    #[error("environment variable {0} is not set")]
    MissingApiKey(String),
    #[error("request failed: {0}")]
    Http(String),
    #[error("endpoint answered with status {status}: {body}")]
    Status { status: u16, body: String },
    #[error("could not decode the endpoint's answer: {0}")]
    Decode(String),
    #[error("no mock rule matches query `{0}`")]
    NoRule(String),
    #[error("scripted transport failure: {0}")]
    Scripted(String),
}

pub trait LlmTransport: Send + Sync {
    fn send(&self, request: &ChatRequest) -> Result<Reply, TransportError>;
}

impl<T: LlmTransport + ?Sized> LlmTransport for std::sync::Arc<T> {
    fn send(&self, request: &ChatRequest) -> Result<Reply, TransportError> {
        (**self).send(request)
    }
}

impl<T: LlmTransport + ?Sized> LlmTransport for &T {
    fn send(&self, request: &ChatRequest) -> Result<Reply, TransportError> {
        (**self).send(request)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RetryPolicy {
    pub max_attempts: u32,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        Self {
            max_attempts: DEFAULT_MAX_ATTEMPTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttemptRecord {
    pub latency_s: f64,
    /// Why the reply was rejected, if it was.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmResponse {
    pub parsed: ParsedResponse,
    pub raw: String,
    /// Total over all attempts, in seconds.
    pub latency_s: f64,
    pub retries_used: u32,
    pub attempts: Vec<AttemptRecord>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompletionError {
    #[error("no valid response after {attempts} attempts: {last_error}")]
    ExhaustedRetries {
        attempts: u32,
        last_error: ResponseError,
        latency_s: f64,
    },
    #[error("transport error: {source}")]
    Transport {
        source: TransportError,
        latency_s: f64,
    },
}

impl CompletionError {
    pub fn latency_s(&self) -> f64 {
        match self {
            CompletionError::ExhaustedRetries { latency_s, .. } | CompletionError::Transport { latency_s, .. } => {
                *latency_s
            }
        }
    }
}

/// Sends `prompt` until a reply parses under `strategy` or the attempts run
/// out. The same prompt is resent on every attempt. Transport failures end
/// the loop at once.
pub fn complete(
    prompt: &str,
    strategy: StrategyKind,
    ctx: &ObjectContext,
    transport: &dyn LlmTransport,
    policy: RetryPolicy,
) -> Result<LlmResponse, CompletionError> {
    let request = ChatRequest {
        strategy,
        prompt: prompt.to_owned(),
    };
    let max = policy.max_attempts.max(1);
    let mut total = Duration::ZERO;
    let mut attempts = Vec::new();
    let mut last_error = None;
    for attempt in 0..max {
        let started = Instant::now();
        let reply = transport.send(&request);
        let measured = started.elapsed();
        let reply = match reply {
            Ok(r) => r,
            Err(source) => {
                total += measured;
                return Err(CompletionError::Transport {
                    source,
                    latency_s: total.as_secs_f64(),
                });
            }
        };
        let spent = reply.simulated_latency.unwrap_or(measured);
        total += spent;
        tracing::debug!(attempt, latency = ?spent, "llm reply");
        match parse_response(strategy, &reply.text, ctx) {
            Ok(parsed) => {
                attempts.push(AttemptRecord {
                    latency_s: spent.as_secs_f64(),
                    error: None,
                });
                return Ok(LlmResponse {
                    parsed,
                    raw: reply.text,
                    latency_s: total.as_secs_f64(),
                    retries_used: attempt,
                    attempts,
                });
            }
            Err(e) => {
                tracing::debug!(attempt, error = %e, "rejected llm reply");
                attempts.push(AttemptRecord {
                    latency_s: spent.as_secs_f64(),
                    error: Some(e.to_string()),
                });
                last_error = Some(e);
            }
        }
    }
    Err(CompletionError::ExhaustedRetries {
        attempts: max,
        last_error: last_error.expect("at least one attempt"),
        latency_s: total.as_secs_f64(),
    })
}
