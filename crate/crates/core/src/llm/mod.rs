//! Prompting, transports and response validation for the three prompting
//! strategies.

mod live;
mod mock;
mod prompt;
mod response;
mod transport;

pub use live::{completion_text, LiveConfig, LiveTransport, API_KEY_VAR};
pub use mock::{
    MockReply, MockRule, MockScript, MockScriptError, MockTiming, MockTransport, DEFAULT_FAILURE_BODY,
};
pub use prompt::{build_prompt, query_line, ContextEntry, ObjectContext, PromptError, PromptStrategy, EXAMPLE_COUNT};
pub use response::{
    euler_to_quaternion, matrix_decomposition, parse_response, payload_for, quaternion_to_euler, response_text,
    rotation_distance, ObjectTransform, ParsedResponse, Payload, ResponseError, MATRIX_ORTHONORMAL_TOL,
};
pub use transport::{
    complete, AttemptRecord, ChatRequest, CompletionError, LlmResponse, LlmTransport, Reply, RetryPolicy,
    TransportError, DEFAULT_MAX_ATTEMPTS,
};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyKind {
    Cga,
    Euclidean,
    Omniverse,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [StrategyKind::Cga, StrategyKind::Euclidean, StrategyKind::Omniverse];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyKind::Cga => "cga",
            StrategyKind::Euclidean => "euclidean",
            StrategyKind::Omniverse => "omniverse",
        }
    }
}

impl std::fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for StrategyKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "cga" => Ok(StrategyKind::Cga),
            "euclidean" => Ok(StrategyKind::Euclidean),
            "omniverse" => Ok(StrategyKind::Omniverse),
            other => Err(format!("unknown strategy `{other}`")),
        }
    }
}
