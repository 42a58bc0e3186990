//! Request/response types shared by every backend.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MessageRole {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChatMessage {
    pub role: MessageRole,
    pub content: String,
}

impl ChatMessage {
    pub fn system(content: impl Into<String>) -> Self {
        ChatMessage {
            role: MessageRole::System,
            content: content.into(),
        }
    }

    pub fn user(content: impl Into<String>) -> Self {
        ChatMessage {
            role: MessageRole::User,
            content: content.into(),
        }
    }

    pub fn assistant(content: impl Into<String>) -> Self {
        ChatMessage {
            role: MessageRole::Assistant,
            content: content.into(),
        }
    }
}

/// One completion request.
///
/// `seed_tag` takes no part in sampling; it only salts the cache key so
/// logically distinct calls with identical message content (e.g. a retry
/// after a malformed reply) are not served the same cached answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LlmRequest {
    pub model: String,
    pub messages: Vec<ChatMessage>,
    pub temperature: f64,
    pub max_tokens: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_tag: Option<String>,
}

impl LlmRequest {
    pub fn new(model: impl Into<String>, messages: Vec<ChatMessage>) -> Self {
        LlmRequest {
            model: model.into(),
            messages,
            temperature: 0.0,
            max_tokens: 4096,
            seed_tag: None,
        }
    }

    pub fn with_temperature(mut self, temperature: f64) -> Self {
        self.temperature = temperature;
        self
    }

    pub fn with_max_tokens(mut self, max_tokens: u32) -> Self {
        self.max_tokens = max_tokens;
        self
    }

    pub fn with_seed_tag(mut self, seed_tag: impl Into<String>) -> Self {
        self.seed_tag = Some(seed_tag.into());
        self
    }

    /// Stable cache key: model, messages, temperature (by bit pattern), and
    /// seed tag. `max_tokens` is deliberately excluded — trimming or raising
    /// the budget should still hit the cache for the same logical call.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.model.as_bytes());
        hasher.update([0x1f]);
        for message in &self.messages {
            let role = match message.role {
                MessageRole::System => "system",
                MessageRole::User => "user",
                MessageRole::Assistant => "assistant",
            };
            hasher.update(role.as_bytes());
            hasher.update([0x1e]);
            hasher.update(message.content.as_bytes());
            hasher.update([0x1f]);
        }
        hasher.update(self.temperature.to_bits().to_le_bytes());
        hasher.update([0x1f]);
        if let Some(tag) = &self.seed_tag {
            hasher.update(tag.as_bytes());
        }
        hex::encode(hasher.finalize())
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenUsage {
    pub prompt_tokens: u32,
    pub completion_tokens: u32,
}

/// One completion result, as handed to callers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LlmResponse {
    pub text: String,
    pub usage: TokenUsage,
    /// Which registered backend produced it.
    pub backend_id: String,
    /// True when served from the disk cache rather than the backend.
    #[serde(default)]
    pub cached: bool,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn request() -> LlmRequest {
        LlmRequest::new("judge-1", vec![ChatMessage::user("hello")]).with_temperature(0.7)
    }

    #[test]
    fn fingerprint_is_stable() {
        assert_eq!(request().fingerprint(), request().fingerprint());
    }

    #[test]
    fn fingerprint_tracks_every_keyed_field() {
        let base = request();
        let mut other_model = base.clone();
        other_model.model = "judge-2".to_string();
        let mut other_content = base.clone();
        other_content.messages[0].content = "hello!".to_string();
        let mut other_role = base.clone();
        other_role.messages[0].role = MessageRole::System;
        let mut other_temp = base.clone();
        other_temp.temperature = 0.8;
        let tagged = base.clone().with_seed_tag("retry-1");
        for variant in [other_model, other_content, other_role, other_temp, tagged] {
            assert_ne!(variant.fingerprint(), base.fingerprint());
        }
    }

    #[test]
    fn fingerprint_ignores_max_tokens() {
        let base = request();
        let trimmed = base.clone().with_max_tokens(16);
        assert_eq!(base.fingerprint(), trimmed.fingerprint());
    }

    #[test]
    fn message_boundaries_cannot_be_forged_by_content() {
        // Two messages ("ab", "c") vs ("a", "bc") must hash differently.
        let left = LlmRequest::new("m", vec![ChatMessage::user("ab"), ChatMessage::user("c")]);
        let right = LlmRequest::new("m", vec![ChatMessage::user("a"), ChatMessage::user("bc")]);
        assert_ne!(left.fingerprint(), right.fingerprint());
    }
}
