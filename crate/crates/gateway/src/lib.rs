//! LLM access layer: fixed prompt templates plus a uniform client over
//! interchangeable backends.
//!
//! The [`Gateway`] fronts any number of named [`LlmBackend`]s and layers the
//! operational concerns every caller would otherwise reimplement:
//!
//! * retry with exponential backoff on transient failures (429, 5xx,
//!   timeouts, transport errors),
//! * a disk response cache with atomic get-or-insert, keyed by a stable
//!   request fingerprint,
//! * per-backend pacing and an in-flight concurrency cap.
//!
//! Backends are either [`HttpBackend`] (any OpenAI-compatible
//! chat-completions endpoint, bearer token from `RUBRICFORGE_API_KEY`) or
//! the scripted [`MockBackend`] used for deterministic offline runs.
//!
//! The [`templates`] module owns the five frozen prompt templates (grading,
//! positive/penalty generation, aggregation, evolution) and the
//! single-pass slot renderer.

pub mod backend;
pub mod cache;
pub mod gateway;
pub mod limit;
pub mod mock;
pub mod request;
pub mod templates;

pub use backend::{BackendError, BackendErrorKind, HttpBackend, LlmBackend, RawCompletion, API_KEY_ENV};
pub use gateway::{BackendOptions, Gateway, GatewayError};
pub use mock::{MockBackend, MockMatcher, MockReply, MockRule, MockScript};
pub use request::{ChatMessage, LlmRequest, LlmResponse, MessageRole, TokenUsage};
pub use templates::{builtin, bindings, PromptTemplate, RenderError, TemplateName};
