//! A scripted backend for deterministic offline runs and tests.
//!
//! A script is an ordered list of rules. Each rule has a matcher (substring
//! of any message, seed-tag prefix, exact model) and a queue of replies
//! consumed in order; `repeat_last` keeps serving the final reply once the
//! queue is drained. A request no rule can serve fails with
//! `SCRIPT_EXHAUSTED` — loudly, so a miswired test never silently grades
//! against the wrong reply.

use std::collections::VecDeque;
use std::sync::Mutex;

use async_trait::async_trait;
use serde::{Deserialize, Serialize};

use crate::backend::{BackendError, BackendErrorKind, LlmBackend, RawCompletion};
use crate::request::{LlmRequest, TokenUsage};

/// All matcher fields are conjunctive; an empty matcher matches everything.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockMatcher {
    /// Substring that must appear in at least one message's content.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contains: Option<String>,
    /// Prefix the request's seed tag must start with.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed_tag: Option<String>,
    /// Exact model name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
}

impl MockMatcher {
    pub fn matches(&self, request: &LlmRequest) -> bool {
        if let Some(needle) = &self.contains {
            if !request.messages.iter().any(|m| m.content.contains(needle)) {
                return false;
            }
        }
        if let Some(prefix) = &self.seed_tag {
            match &request.seed_tag {
                Some(tag) if tag.starts_with(prefix) => {}
                _ => return false,
            }
        }
        if let Some(model) = &self.model {
            if &request.model != model {
                return false;
            }
        }
        true
    }
}

/// One scripted reply: either text or a synthetic backend failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MockReply {
    Text(String),
    Error {
        status: Option<u16>,
        retryable: bool,
        message: String,
    },
}

// JSON form: a plain string, or {"error": {"status": 429, "retryable": true,
// "message": "..."}}.
#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum MockReplyWire {
    Text(String),
    Error { error: MockErrorWire },
}

#[derive(Serialize, Deserialize)]
struct MockErrorWire {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    status: Option<u16>,
    #[serde(default)]
    retryable: bool,
    #[serde(default)]
    message: String,
}

impl From<MockReplyWire> for MockReply {
    fn from(wire: MockReplyWire) -> Self {
        match wire {
            MockReplyWire::Text(text) => MockReply::Text(text),
            MockReplyWire::Error { error } => MockReply::Error {
                status: error.status,
                retryable: error.retryable,
                message: error.message,
            },
        }
    }
}

impl From<MockReply> for MockReplyWire {
    fn from(reply: MockReply) -> Self {
        match reply {
            MockReply::Text(text) => MockReplyWire::Text(text),
            MockReply::Error {
                status,
                retryable,
                message,
            } => MockReplyWire::Error {
                error: MockErrorWire {
                    status,
                    retryable,
                    message,
                },
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockRule {
    #[serde(default, rename = "match")]
    pub matcher: MockMatcher,
    #[serde(with = "reply_list")]
    pub replies: VecDeque<MockReply>,
    /// Keep serving the last reply after the queue is consumed.
    #[serde(default)]
    pub repeat_last: bool,
}

mod reply_list {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        replies: &VecDeque<MockReply>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        let wire: Vec<MockReplyWire> = replies.iter().cloned().map(Into::into).collect();
        serde::Serialize::serialize(&wire, serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<VecDeque<MockReply>, D::Error> {
        let wire: Vec<MockReplyWire> = serde::Deserialize::deserialize(deserializer)?;
        Ok(wire.into_iter().map(Into::into).collect())
    }
}

/// On-disk script shape: `{"rules": [...]}`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MockScript {
    pub rules: Vec<MockRule>,
}

struct MockState {
    rules: Vec<MockRule>,
    /// Last reply per rule, retained for `repeat_last`.
    last_served: Vec<Option<MockReply>>,
    calls: Vec<LlmRequest>,
}

/// Deterministic scripted backend.
pub struct MockBackend {
    id: String,
    state: Mutex<MockState>,
}

impl MockBackend {
    pub fn new(id: impl Into<String>, script: MockScript) -> Self {
        let last_served = vec![None; script.rules.len()];
        MockBackend {
            id: id.into(),
            state: Mutex::new(MockState {
                rules: script.rules,
                last_served,
                calls: Vec::new(),
            }),
        }
    }

    /// One catch-all rule that always returns `text`.
    pub fn fixed(id: impl Into<String>, text: impl Into<String>) -> Self {
        MockBackend::new(
            id,
            MockScript {
                rules: vec![MockRule {
                    matcher: MockMatcher::default(),
                    replies: VecDeque::from([MockReply::Text(text.into())]),
                    repeat_last: true,
                }],
            },
        )
    }

    pub fn from_script_json(id: impl Into<String>, json: &str) -> Result<Self, serde_json::Error> {
        Ok(MockBackend::new(id, serde_json::from_str(json)?))
    }

    /// Every request seen so far, in arrival order.
    pub fn calls(&self) -> Vec<LlmRequest> {
        self.state.lock().expect("mock state lock").calls.clone()
    }

    pub fn call_count(&self) -> usize {
        self.state.lock().expect("mock state lock").calls.len()
    }
}

#[async_trait]
impl LlmBackend for MockBackend {
    fn id(&self) -> &str {
        &self.id
    }

    async fn complete(&self, request: &LlmRequest) -> Result<RawCompletion, BackendError> {
        let mut state = self.state.lock().expect("mock state lock");
        let MockState {
            rules,
            last_served,
            calls,
        } = &mut *state;
        calls.push(request.clone());

        let mut reply = None;
        for (index, rule) in rules.iter_mut().enumerate() {
            if !rule.matcher.matches(request) {
                continue;
            }
            if let Some(next) = rule.replies.pop_front() {
                last_served[index] = Some(next.clone());
                reply = Some(next);
                break;
            }
            if rule.repeat_last {
                if let Some(last) = last_served[index].clone() {
                    reply = Some(last);
                    break;
                }
            }
            // Drained, non-repeating rule: fall through to later rules.
        }
        drop(state);

        match reply {
            Some(MockReply::Text(text)) => {
                // Crude but deterministic usage accounting: whitespace tokens.
                let prompt_tokens: usize = request
                    .messages
                    .iter()
                    .map(|m| m.content.split_whitespace().count())
                    .sum();
                Ok(RawCompletion {
                    usage: TokenUsage {
                        prompt_tokens: prompt_tokens as u32,
                        completion_tokens: text.split_whitespace().count() as u32,
                    },
                    text,
                })
            }
            Some(MockReply::Error {
                status,
                retryable,
                message,
            }) => Err(BackendError {
                backend_id: self.id.clone(),
                kind: BackendErrorKind::Http,
                status,
                retryable,
                message,
            }),
            None => Err(BackendError {
                backend_id: self.id.clone(),
                kind: BackendErrorKind::ScriptExhausted,
                status: None,
                retryable: false,
                message: format!(
                    "SCRIPT_EXHAUSTED: no scripted reply for model `{}`, seed_tag {:?}",
                    request.model, request.seed_tag
                ),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::request::ChatMessage;

    fn request(content: &str) -> LlmRequest {
        LlmRequest::new("m1", vec![ChatMessage::user(content)])
    }

    #[tokio::test]
    async fn replies_are_consumed_in_order() {
        let backend = MockBackend::new(
            "mock",
            MockScript {
                rules: vec![MockRule {
                    matcher: MockMatcher::default(),
                    replies: VecDeque::from([
                        MockReply::Text("first".to_string()),
                        MockReply::Text("second".to_string()),
                    ]),
                    repeat_last: false,
                }],
            },
        );
        assert_eq!(backend.complete(&request("a")).await.unwrap().text, "first");
        assert_eq!(backend.complete(&request("b")).await.unwrap().text, "second");
        let err = backend.complete(&request("c")).await.unwrap_err();
        assert_eq!(err.kind, BackendErrorKind::ScriptExhausted);
        assert!(err.message.contains("SCRIPT_EXHAUSTED"));
        assert_eq!(backend.call_count(), 3);
    }

    #[tokio::test]
    async fn repeat_last_keeps_serving_final_reply() {
        let backend = MockBackend::fixed("mock", "always");
        for _ in 0..5 {
            assert_eq!(backend.complete(&request("x")).await.unwrap().text, "always");
        }
    }

    #[tokio::test]
    async fn matchers_route_by_content_seed_and_model() {
        let script = MockScript {
            rules: vec![
                MockRule {
                    matcher: MockMatcher {
                        contains: Some("alpha".to_string()),
                        ..MockMatcher::default()
                    },
                    replies: VecDeque::from([MockReply::Text("by-content".to_string())]),
                    repeat_last: true,
                },
                MockRule {
                    matcher: MockMatcher {
                        seed_tag: Some("gen:q01".to_string()),
                        ..MockMatcher::default()
                    },
                    replies: VecDeque::from([MockReply::Text("by-seed".to_string())]),
                    repeat_last: true,
                },
                MockRule {
                    matcher: MockMatcher {
                        model: Some("m2".to_string()),
                        ..MockMatcher::default()
                    },
                    replies: VecDeque::from([MockReply::Text("by-model".to_string())]),
                    repeat_last: true,
                },
            ],
        };
        let backend = MockBackend::new("mock", script);
        assert_eq!(
            backend.complete(&request("say alpha please")).await.unwrap().text,
            "by-content"
        );
        let seeded = request("other").with_seed_tag("gen:q01:m1#a0");
        assert_eq!(backend.complete(&seeded).await.unwrap().text, "by-seed");
        let mut for_m2 = request("other");
        for_m2.model = "m2".to_string();
        assert_eq!(backend.complete(&for_m2).await.unwrap().text, "by-model");
        assert!(backend.complete(&request("nothing")).await.is_err());
    }

    #[tokio::test]
    async fn scripted_errors_surface_as_backend_errors() {
        let script_json = r#"{
            "rules": [{
                "match": {},
                "replies": [
                    {"error": {"status": 429, "retryable": true, "message": "slow down"}},
                    "recovered"
                ],
                "repeat_last": true
            }]
        }"#;
        let backend = MockBackend::from_script_json("mock", script_json).unwrap();
        let err = backend.complete(&request("x")).await.unwrap_err();
        assert_eq!(err.status, Some(429));
        assert!(err.retryable);
        assert_eq!(backend.complete(&request("x")).await.unwrap().text, "recovered");
    }

    #[test]
    fn script_json_round_trips() {
        let script = MockScript {
            rules: vec![MockRule {
                matcher: MockMatcher {
                    contains: Some("q".to_string()),
                    ..MockMatcher::default()
                },
                replies: VecDeque::from([
                    MockReply::Text("t".to_string()),
                    MockReply::Error {
                        status: Some(500),
                        retryable: true,
                        message: "boom".to_string(),
                    },
                ]),
                repeat_last: true,
            }],
        };
        let json = serde_json::to_string(&script).unwrap();
        let back: MockScript = serde_json::from_str(&json).unwrap();
        assert_eq!(back, script);
    }
}
