use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;

use super::{CallContext, ChatMessage, LlmClient, LlmError, SamplingParams};

/// Scripted responses.
///
/// The replay file is JSON, either a list of responses shared by every case
/// or an object mapping case ids to lists (with an optional `"*"` fallback):
///
/// ```json
/// { "vector_add": ["```c\n...\n```", "..."], "*": ["..."] }
/// ```
///
/// Call `seq` of a case receives entry `seq` of that case's list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplayClient {
    scripts: BTreeMap<String, Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ReplayError {
    #[error("cannot read replay file {path}: {message}")]
    Read { path: String, message: String },
    #[error("replay file {path} is malformed: {message}")]
    Parse { path: String, message: String },
    #[error("replay script for `{case}` has no response #{seq}")]
    Exhausted { case: String, seq: usize },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum ReplayFile {
    Shared(Vec<String>),
    PerCase(BTreeMap<String, Vec<String>>),
}

const ANY_CASE: &str = "*";

impl ReplayClient {
    pub fn from_file(path: &Path) -> Result<Self, ReplayError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ReplayError::Read { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text).map_err(|e| match e {
            ReplayError::Parse { message, .. } => ReplayError::Parse { path: path.display().to_string(), message },
            other => other,
        })
    }

    pub fn from_json(text: &str) -> Result<Self, ReplayError> {
        let file: ReplayFile =
            serde_json::from_str(text).map_err(|e| ReplayError::Parse { path: "<inline>".into(), message: e.to_string() })?;
        Ok(match file {
            ReplayFile::Shared(list) => Self::shared(list),
            ReplayFile::PerCase(scripts) => ReplayClient { scripts },
        })
    }

    pub fn shared(responses: Vec<String>) -> Self {
        ReplayClient { scripts: BTreeMap::from([(ANY_CASE.to_string(), responses)]) }
    }

    pub fn per_case(scripts: BTreeMap<String, Vec<String>>) -> Self {
        ReplayClient { scripts }
    }

    pub fn script_len(&self, case_id: &str) -> usize {
        self.script(case_id).map_or(0, Vec::len)
    }

    fn script(&self, case_id: &str) -> Option<&Vec<String>> {
        self.scripts.get(case_id).or_else(|| self.scripts.get(ANY_CASE))
    }
}

impl LlmClient for ReplayClient {
    fn complete(&self, ctx: &CallContext, _: &[ChatMessage], _: &SamplingParams) -> Result<String, LlmError> {
        self.script(&ctx.case_id)
            .and_then(|s| s.get(ctx.seq))
            .cloned()
            .ok_or_else(|| ReplayError::Exhausted { case: ctx.case_id.clone(), seq: ctx.seq }.into())
    }

    fn describe(&self) -> String {
        format!("replay ({} scripts)", self.scripts.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(case: &str, seq: usize) -> CallContext {
        CallContext { case_id: case.into(), seq }
    }

    #[test]
    fn per_case_with_fallback() {
        let c = ReplayClient::from_json(r#"{"a": ["a0", "a1"], "*": ["any0"]}"#).unwrap();
        let p = SamplingParams::default();
        assert_eq!(c.complete(&ctx("a", 1), &[], &p).unwrap(), "a1");
        assert_eq!(c.complete(&ctx("b", 0), &[], &p).unwrap(), "any0");
        assert!(matches!(
            c.complete(&ctx("a", 2), &[], &p),
            Err(LlmError::Replay(ReplayError::Exhausted { seq: 2, .. }))
        ));
    }

    #[test]
    fn shared_list() {
        let c = ReplayClient::from_json(r#"["x", "y"]"#).unwrap();
        assert_eq!(c.complete(&ctx("anything", 1), &[], &SamplingParams::default()).unwrap(), "y");
    }

    #[test]
    fn malformed_file() {
        assert!(matches!(ReplayClient::from_json("{\"a\": 3}"), Err(ReplayError::Parse { .. })));
    }
}
