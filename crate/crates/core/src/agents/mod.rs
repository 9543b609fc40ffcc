//! Translator and optimizer agents: prompt construction, LLM clients and
//! code extraction.

mod extract;
mod prompts;
#[cfg(feature = "remote")]
mod remote;
mod replay;

use serde::{Deserialize, Serialize};

pub use extract::{extract_code, ExtractError};
pub use prompts::{
    build_optimize_prompt, build_repair_prompt, build_translate_prompt, truncate_diagnostics, Feedback,
    FeedbackKind, PromptBundle, PromptError, Purpose, DEFAULT_FEEDBACK_BUDGET, PROMPT_VERSION,
};
#[cfg(feature = "remote")]
pub use remote::{RemoteClient, RemoteConfig, API_KEY_ENV};
pub use replay::{ReplayClient, ReplayError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: Role,
    pub content: String,
}

impl ChatMessage {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        let content = content.into();
        debug_assert!(!content.is_empty(), "chat messages must not be empty");
        ChatMessage { role, content }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingParams {
    pub temperature: f64,
    pub max_tokens: u32,
}

impl Default for SamplingParams {
    fn default() -> Self {
        SamplingParams { temperature: 0.2, max_tokens: 8192 }
    }
}

/// Identifies a call so deterministic clients can answer per task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallContext {
    pub case_id: String,
    /// 0-based index of this call within the task.
    pub seq: usize,
}

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error(transparent)]
    Replay(#[from] ReplayError),
    #[error("request failed after {attempts} attempts: {message}")]
    Exhausted { attempts: u32, message: String },
    #[error("request rejected: {0}")]
    Rejected(String),
    #[error("malformed response: {0}")]
    Malformed(String),
    #[error("missing API key: set {0}")]
    MissingKey(String),
}

pub trait LlmClient: Send + Sync {
    fn complete(
        &self,
        ctx: &CallContext,
        messages: &[ChatMessage],
        params: &SamplingParams,
    ) -> Result<String, LlmError>;

    fn describe(&self) -> String;
}

pub(crate) fn sha256_hex(parts: &[&[u8]]) -> String {
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p);
    }
    hex::encode(h.finalize())
}
