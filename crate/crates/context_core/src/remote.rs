use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::{ContextItem, Reply, Role, SessionError, SessionFunction, Usage};

pub const ENV_BASE_URL: &str = "LLM_BASE_URL";
pub const ENV_API_KEY: &str = "LLM_API_KEY";
pub const ENV_MODEL: &str = "LLM_MODEL";

#[derive(Debug, Clone)]
pub struct RemoteChatConfig {
    pub base_url: String,
    pub api_key: String,
    pub model: String,
    pub temperature: Option<f64>,
    pub max_attempts: u32,
    pub retry_backoff: Duration,
    pub timeout: Duration,
}

impl RemoteChatConfig {
    pub fn new(base_url: impl Into<String>, api_key: impl Into<String>, model: impl Into<String>) -> Self {
        Self {
            base_url: base_url.into(),
            api_key: api_key.into(),
            model: model.into(),
            temperature: None,
            max_attempts: 3,
            retry_backoff: Duration::from_millis(500),
            timeout: Duration::from_secs(120),
        }
    }

    /// Reads `LLM_API_KEY`, `LLM_BASE_URL` and `LLM_MODEL`.
    pub fn from_env() -> Result<Self, SessionError> {
        let key = require_env(ENV_API_KEY)?;
        let base = require_env(ENV_BASE_URL)?;
        let model = require_env(ENV_MODEL)?;
        Ok(Self::new(base, key, model))
    }

    pub fn with_temperature(mut self, t: f64) -> Self {
        self.temperature = Some(t);
        self
    }

    pub fn with_retries(mut self, max_attempts: u32, backoff: Duration) -> Self {
        self.max_attempts = max_attempts.max(1);
        self.retry_backoff = backoff;
        self
    }
}

fn require_env(name: &'static str) -> Result<String, SessionError> {
    match std::env::var(name) {
        Ok(v) if !v.trim().is_empty() => Ok(v),
        _ => Err(SessionError::MissingEnv(name)),
    }
}

#[derive(Debug, Serialize, PartialEq)]
struct ChatMessage {
    role: &'static str,
    content: String,
}

#[derive(Debug, Serialize)]
struct ChatRequest<'a> {
    model: &'a str,
    messages: Vec<ChatMessage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
}

#[derive(Deserialize)]
struct ChatResponse {
    choices: Vec<Choice>,
    usage: Option<ChatUsage>,
}

#[derive(Deserialize)]
struct Choice {
    message: ChoiceMessage,
}

#[derive(Deserialize)]
struct ChoiceMessage {
    content: Option<String>,
}

#[derive(Deserialize)]
struct ChatUsage {
    prompt_tokens: u64,
    completion_tokens: u64,
}

/// Chat-completions client (`POST {base}/chat/completions`).
///
/// Agent fragments become `assistant` messages; Tool fragments are sent as
/// `user` messages prefixed with `[tool]`, since plain chat endpoints reject
/// tool messages without a call id.
pub struct RemoteChatSession {
    config: RemoteChatConfig,
    client: reqwest::blocking::Client,
}

impl RemoteChatSession {
    pub fn new(config: RemoteChatConfig) -> Result<Self, SessionError> {
        let client = reqwest::blocking::Client::builder()
            .timeout(config.timeout)
            .build()
            .map_err(|e| SessionError::Config(e.to_string()))?;
        Ok(Self { config, client })
    }

    pub fn from_env() -> Result<Self, SessionError> {
        Self::new(RemoteChatConfig::from_env()?)
    }

    fn messages(input: &ContextItem) -> Vec<ChatMessage> {
        input
            .to_messages()
            .into_iter()
            .map(|m| match m.role {
                Role::User => ChatMessage { role: "user", content: m.content },
                Role::Agent => ChatMessage { role: "assistant", content: m.content },
                Role::System => ChatMessage { role: "system", content: m.content },
                Role::Tool => ChatMessage { role: "user", content: format!("[tool] {}", m.content) },
            })
            .collect()
    }

    fn attempt(&self, body: &[u8]) -> Result<Reply, Result<SessionError, String>> {
        let url = format!("{}/chat/completions", self.config.base_url.trim_end_matches('/'));
        let started = Instant::now();
        let resp = self
            .client
            .post(url)
            .bearer_auth(&self.config.api_key)
            .header("content-type", "application/json")
            .body(body.to_vec())
            .send()
            .map_err(|e| Err(e.to_string()))?;
        let status = resp.status();
        let text = resp.text().map_err(|e| Err(e.to_string()))?;
        if status.is_server_error() || status.as_u16() == 429 {
            return Err(Err(format!("HTTP {status}")));
        }
        if !status.is_success() {
            return Err(Ok(SessionError::Protocol(format!("HTTP {status}: {text}"))));
        }
        let parsed: ChatResponse =
            serde_json::from_str(&text).map_err(|e| Ok(SessionError::Protocol(e.to_string())))?;
        let content = parsed
            .choices
            .into_iter()
            .next()
            .and_then(|c| c.message.content)
            .ok_or_else(|| Ok(SessionError::Protocol("reply has no message content".into())))?;
        Ok(Reply {
            text: content,
            usage: parsed.usage.map(|u| Usage { prompt: u.prompt_tokens, completion: u.completion_tokens }),
            wall_time: started.elapsed().as_secs_f64(),
        })
    }
}

impl SessionFunction for RemoteChatSession {
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError> {
        let req = ChatRequest {
            model: &self.config.model,
            messages: Self::messages(input),
            temperature: self.config.temperature,
        };
        let body = serde_json::to_vec(&req).map_err(|e| SessionError::Protocol(e.to_string()))?;
        let mut attempts = 0;
        loop {
            attempts += 1;
            match self.attempt(&body) {
                Ok(r) => return Ok(r),
                Err(Ok(fatal)) => return Err(fatal),
                Err(Err(message)) => {
                    if attempts >= self.config.max_attempts {
                        return Err(SessionError::Transport { attempts, message });
                    }
                    std::thread::sleep(self.config.retry_backoff * attempts);
                }
            }
        }
    }
}
