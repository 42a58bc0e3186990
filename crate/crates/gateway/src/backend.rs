//! The backend abstraction and the HTTP chat-completions implementation.

use std::time::Duration;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::request::{LlmRequest, TokenUsage};

/// Why a backend call failed, mostly for error mapping and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendErrorKind {
    /// Upstream returned a non-success HTTP status.
    Http,
    /// The request timed out.
    Timeout,
    /// Connection-level failure (DNS, refused, reset).
    Transport,
    /// A mock backend ran out of scripted replies for this request.
    ScriptExhausted,
    /// Upstream replied 2xx but the payload was unusable.
    Malformed,
}

#[derive(Debug, Error)]
#[error("backend `{backend_id}` failed ({kind:?}{}): {message}", status.map(|s| format!(", status {s}")).unwrap_or_default())]
pub struct BackendError {
    pub backend_id: String,
    pub kind: BackendErrorKind,
    pub status: Option<u16>,
    /// Whether the gateway's retry policy should try again.
    pub retryable: bool,
    pub message: String,
}

/// The raw output of one backend call, before caching metadata is attached.
#[derive(Debug, Clone)]
pub struct RawCompletion {
    pub text: String,
    pub usage: TokenUsage,
}

/// Anything that can answer a completion request: an HTTP provider in
/// production, a scripted mock in tests.
#[async_trait]
pub trait LlmBackend: Send + Sync {
    fn id(&self) -> &str;
    async fn complete(&self, request: &LlmRequest) -> Result<RawCompletion, BackendError>;
}

/// Environment variable holding the bearer token for HTTP backends.
pub const API_KEY_ENV: &str = "RUBRICFORGE_API_KEY";

/// Chat-completions client for any OpenAI-compatible endpoint.
pub struct HttpBackend {
    id: String,
    base_url: String,
    api_key: Option<String>,
    client: reqwest::Client,
}

impl HttpBackend {
    /// `base_url` is the provider root, e.g. `https://api.example.com/v1`;
    /// requests go to `{base_url}/chat/completions`. The bearer token is
    /// read from `RUBRICFORGE_API_KEY` at construction; absent means
    /// unauthenticated (local inference servers).
    pub fn new(id: impl Into<String>, base_url: impl Into<String>, timeout: Duration) -> Self {
        let client = reqwest::Client::builder()
            .timeout(timeout)
            .build()
            .expect("reqwest client construction with static options");
        HttpBackend {
            id: id.into(),
            base_url: base_url.into().trim_end_matches('/').to_string(),
            api_key: std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()),
            client,
        }
    }

    fn error(&self, kind: BackendErrorKind, status: Option<u16>, retryable: bool, message: impl Into<String>) -> BackendError {
        BackendError {
            backend_id: self.id.clone(),
            kind,
            status,
            retryable,
            message: message.into(),
        }
    }
}

#[derive(Serialize)]
struct WireRequest<'a> {
    model: &'a str,
    messages: Vec<WireMessage<'a>>,
    temperature: f64,
    max_tokens: u32,
}

#[derive(Serialize)]
struct WireMessage<'a> {
    role: &'a str,
    content: &'a str,
}

#[derive(Deserialize)]
struct WireResponse {
    choices: Vec<WireChoice>,
    #[serde(default)]
    usage: Option<WireUsage>,
}

#[derive(Deserialize)]
struct WireChoice {
    message: WireChoiceMessage,
}

#[derive(Deserialize)]
struct WireChoiceMessage {
    content: String,
}

#[derive(Deserialize, Default)]
struct WireUsage {
    #[serde(default)]
    prompt_tokens: u32,
    #[serde(default)]
    completion_tokens: u32,
}

#[async_trait]
impl LlmBackend for HttpBackend {
    fn id(&self) -> &str {
        &self.id
    }

    async fn complete(&self, request: &LlmRequest) -> Result<RawCompletion, BackendError> {
        let wire = WireRequest {
            model: &request.model,
            messages: request
                .messages
                .iter()
                .map(|m| WireMessage {
                    role: match m.role {
                        crate::request::MessageRole::System => "system",
                        crate::request::MessageRole::User => "user",
                        crate::request::MessageRole::Assistant => "assistant",
                    },
                    content: &m.content,
                })
                .collect(),
            temperature: request.temperature,
            max_tokens: request.max_tokens,
        };
        let url = format!("{}/chat/completions", self.base_url);
        let mut http_request = self.client.post(&url).json(&wire);
        if let Some(key) = &self.api_key {
            http_request = http_request.bearer_auth(key);
        }

        let response = http_request.send().await.map_err(|e| {
            if e.is_timeout() {
                self.error(BackendErrorKind::Timeout, None, true, e.to_string())
            } else {
                self.error(BackendErrorKind::Transport, None, true, e.to_string())
            }
        })?;

        let status = response.status();
        if !status.is_success() {
            // 429 and 5xx are transient provider states; 4xx means the
            // request itself is bad and retrying would just repeat it.
            let retryable = status.as_u16() == 429 || status.is_server_error();
            let body = response.text().await.unwrap_or_default();
            let cut = body
                .char_indices()
                .nth(200)
                .map(|(i, _)| i)
                .unwrap_or(body.len());
            return Err(self.error(
                BackendErrorKind::Http,
                Some(status.as_u16()),
                retryable,
                body[..cut].to_string(),
            ));
        }

        let parsed: WireResponse = response.json().await.map_err(|e| {
            self.error(BackendErrorKind::Malformed, Some(status.as_u16()), false, e.to_string())
        })?;
        let choice = parsed.choices.into_iter().next().ok_or_else(|| {
            self.error(
                BackendErrorKind::Malformed,
                Some(status.as_u16()),
                false,
                "response has no choices",
            )
        })?;
        let usage = parsed.usage.unwrap_or_default();
        Ok(RawCompletion {
            text: choice.message.content,
            usage: TokenUsage {
                prompt_tokens: usage.prompt_tokens,
                completion_tokens: usage.completion_tokens,
            },
        })
    }
}
