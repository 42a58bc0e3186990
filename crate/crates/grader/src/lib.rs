//! Unified grading of responses against rubrics.
//!
//! A rubric mixes two kinds of criteria and this crate grades both through
//! one entry point:
//!
//! - **Verifiable** criteria run deterministic rule [`checkers`] (placeholder
//!   counts, letter frequencies, comma bans, exact phrases, required
//!   prefixes) against the response text, in-process and for free.
//! - **Semantic** criteria are judged by an LLM through the request gateway,
//!   one criterion per call, with bounded fan-out and parse-failure retries.
//!
//! Every criterion yields a boolean [`Judgment`]; [`score`] folds the
//! judgments into a weight-normalized reward in `[0, 1]` where penalty
//! (negative-weight) criteria subtract when tripped.

pub mod checkers;
pub mod conversation;
pub mod engine;
pub mod judgment;
pub mod score;

pub use checkers::{check_verifiable, CheckError, CheckOutcome, CheckerRegistry, CheckerSpec};
pub use conversation::{Conversation, Role, Turn};
pub use engine::{render_rubric_item, FailurePolicy, GradeError, Grader, GraderConfig};
pub use judgment::{parse_judgment, Judgment, JudgmentParseError, JudgmentPayload, JudgmentSource};
pub use score::{score, ScoreError, ScoreReport};
