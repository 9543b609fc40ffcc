use std::thread;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::{CallContext, ChatMessage, LlmClient, LlmError, SamplingParams};

/// Environment variable holding the bearer token. Keys are never read from
/// flags or files.
pub const API_KEY_ENV: &str = "VECPORT_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct RemoteConfig {
    /// Full URL of a chat-completions endpoint.
    pub endpoint: String,
    pub model: String,
    pub timeout: Duration,
    pub max_attempts: u32,
    /// Delay before the second attempt; doubles after each failure.
    pub initial_backoff: Duration,
}

impl RemoteConfig {
    pub fn new(endpoint: impl Into<String>, model: impl Into<String>) -> Self {
        RemoteConfig {
            endpoint: endpoint.into(),
            model: model.into(),
            timeout: Duration::from_secs(120),
            max_attempts: 3,
            initial_backoff: Duration::from_secs(2),
        }
    }
}

/// Blocking client for OpenAI-style chat-completion endpoints.
pub struct RemoteClient {
    config: RemoteConfig,
    api_key: String,
    http: reqwest::blocking::Client,
}

#[derive(Serialize)]
struct Request<'a> {
    model: &'a str,
    messages: &'a [ChatMessage],
    temperature: f64,
    max_tokens: u32,
}

#[derive(Deserialize)]
struct Response {
    choices: Vec<Choice>,
}

#[derive(Deserialize)]
struct Choice {
    message: ResponseMessage,
}

#[derive(Deserialize)]
struct ResponseMessage {
    content: Option<String>,
}

enum Failure {
    Retry(String),
    Fatal(LlmError),
}

impl RemoteClient {
    /// Reads the API key from [`API_KEY_ENV`].
    pub fn from_env(config: RemoteConfig) -> Result<Self, LlmError> {
        let key = std::env::var(API_KEY_ENV).map_err(|_| LlmError::MissingKey(API_KEY_ENV.into()))?;
        Self::with_key(config, key)
    }

    pub fn with_key(config: RemoteConfig, api_key: String) -> Result<Self, LlmError> {
        let http = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| LlmError::Rejected(format!("building HTTP client: {e}")))?;
        Ok(RemoteClient { config, api_key, http })
    }

    fn attempt(&self, body: &Request<'_>) -> Result<String, Failure> {
        let resp = self
            .http
            .post(&self.config.endpoint)
            .bearer_auth(&self.api_key)
            .json(body)
            .send()
            .map_err(|e| Failure::Retry(e.to_string()))?;
        let status = resp.status();
        if status.as_u16() == 429 || status.is_server_error() {
            return Err(Failure::Retry(format!("HTTP {status}")));
        }
        if !status.is_success() {
            let text = resp.text().unwrap_or_default();
            return Err(Failure::Fatal(LlmError::Rejected(format!("HTTP {status}: {text}"))));
        }
        let parsed: Response = resp.json().map_err(|e| Failure::Fatal(LlmError::Malformed(e.to_string())))?;
        parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| Failure::Fatal(LlmError::Malformed("no choices[0].message.content".into())))
    }
}

impl LlmClient for RemoteClient {
    fn complete(&self, ctx: &CallContext, messages: &[ChatMessage], params: &SamplingParams) -> Result<String, LlmError> {
        let body = Request {
            model: &self.config.model,
            messages,
            temperature: params.temperature,
            max_tokens: params.max_tokens,
        };
        let mut backoff = self.config.initial_backoff;
        let mut last = String::new();
        for attempt in 1..=self.config.max_attempts {
            match self.attempt(&body) {
                Ok(text) => return Ok(text),
                Err(Failure::Fatal(e)) => return Err(e),
                Err(Failure::Retry(msg)) => {
                    log::warn!("{} call {}: attempt {attempt} failed: {msg}", ctx.case_id, ctx.seq);
                    last = msg;
                    if attempt < self.config.max_attempts {
                        thread::sleep(backoff);
                        backoff *= 2;
                    }
                }
            }
        }
        Err(LlmError::Exhausted { attempts: self.config.max_attempts, message: last })
    }

    fn describe(&self) -> String {
        format!("{} at {}", self.config.model, self.config.endpoint)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Role;
    use std::io::{BufRead, BufReader, Read, Write};
    use std::net::TcpListener;
    use std::sync::{Arc, Mutex};

    /// Serves one canned HTTP response per connection, recording request bodies.
    fn serve(responses: Vec<(u16, String)>) -> (String, Arc<Mutex<Vec<String>>>) {
        let listener = TcpListener::bind("127.0.0.1:0").unwrap();
        let url = format!("http://{}/v1/chat/completions", listener.local_addr().unwrap());
        let seen = Arc::new(Mutex::new(Vec::new()));
        let log = Arc::clone(&seen);
        thread::spawn(move || {
            for (status, body) in responses {
                let (mut stream, _) = listener.accept().unwrap();
                let mut reader = BufReader::new(stream.try_clone().unwrap());
                let mut len = 0;
                let mut auth = String::new();
                loop {
                    let mut line = String::new();
                    reader.read_line(&mut line).unwrap();
                    let lower = line.to_ascii_lowercase();
                    if let Some(v) = lower.strip_prefix("content-length:") {
                        len = v.trim().parse().unwrap();
                    }
                    if lower.starts_with("authorization:") {
                        auth = line.trim().to_string();
                    }
                    if line == "\r\n" || line.is_empty() {
                        break;
                    }
                }
                let mut buf = vec![0; len];
                reader.read_exact(&mut buf).unwrap();
                log.lock().unwrap().push(format!("{auth}\n{}", String::from_utf8_lossy(&buf)));
                let reply = format!(
                    "HTTP/1.1 {status} X\r\ncontent-type: application/json\r\ncontent-length: {}\r\nconnection: close\r\n\r\n{body}",
                    body.len()
                );
                stream.write_all(reply.as_bytes()).unwrap();
            }
        });
        (url, seen)
    }

    fn client(url: String) -> RemoteClient {
        let mut cfg = RemoteConfig::new(url, "test-model");
        cfg.initial_backoff = Duration::from_millis(5);
        cfg.timeout = Duration::from_secs(5);
        RemoteClient::with_key(cfg, "sekrit".into()).unwrap()
    }

    fn call(c: &RemoteClient) -> Result<String, LlmError> {
        c.complete(
            &CallContext { case_id: "vector_add".into(), seq: 0 },
            &[ChatMessage::new(Role::User, "hi")],
            &SamplingParams::default(),
        )
    }

    const OK: &str = r#"{"choices":[{"message":{"role":"assistant","content":"```c\nint x;\n```"}}]}"#;

    #[test]
    fn retries_transient_failures() {
        let (url, seen) = serve(vec![(503, "{}".into()), (429, "{}".into()), (200, OK.into())]);
        assert_eq!(call(&client(url)).unwrap(), "```c\nint x;\n```");
        let seen = seen.lock().unwrap();
        assert_eq!(seen.len(), 3);
        assert!(seen[0].contains("Bearer sekrit"));
        assert!(seen[0].contains("\"temperature\":0.2"));
        assert!(seen[0].contains("\"model\":\"test-model\""));
    }

    #[test]
    fn gives_up_after_three_attempts() {
        let (url, seen) = serve(vec![(500, "{}".into()), (500, "{}".into()), (500, "{}".into())]);
        assert!(matches!(call(&client(url)), Err(LlmError::Exhausted { attempts: 3, .. })));
        assert_eq!(seen.lock().unwrap().len(), 3);
    }

    #[test]
    fn client_errors_are_not_retried() {
        let (url, seen) = serve(vec![(400, r#"{"error":"bad"}"#.into())]);
        assert!(matches!(call(&client(url)), Err(LlmError::Rejected(_))));
        assert_eq!(seen.lock().unwrap().len(), 1);
    }
}
