//! Per-criterion verdicts and the parser for judge-model replies.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::json_candidate;

/// Who produced a judgment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JudgmentSource {
    /// A registered rule checker.
    Rule,
    /// A judge model.
    Llm,
}

/// One criterion's verdict on one response.
///
/// `criteria_met` is the raw binary: for penalty criteria `true` means the
/// described failure is present (and the negative weight applies), not that
/// the response is good.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Judgment {
    pub criterion_id: String,
    pub criteria_met: bool,
    pub explanation: String,
    /// `rule:{checker_id}` or `llm:{model}`.
    pub grader_id: String,
    pub source: JudgmentSource,
    /// Set when grading this criterion failed and the failure policy
    /// substituted `criteria_met: false`; holds the failure description.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// The two fields a judge reply must carry.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
pub struct JudgmentPayload {
    pub explanation: String,
    pub criteria_met: bool,
}

#[derive(Debug, Error)]
#[error("JUDGMENT_PARSE_ERROR: {reason} (reply starts {snippet:?})")]
pub struct JudgmentParseError {
    pub reason: String,
    pub snippet: String,
}

/// Parses a judge reply: a JSON object with a string `explanation` and a
/// boolean `criteria_met`, fenced or bare. Extra fields are ignored;
/// anything else — including string-typed booleans like `"yes"` — is
/// rejected.
pub fn parse_judgment(text: &str) -> Result<JudgmentPayload, JudgmentParseError> {
    let candidate = json_candidate(text);
    let err = |reason: String| {
        let cut = candidate
            .char_indices()
            .nth(60)
            .map(|(i, _)| i)
            .unwrap_or(candidate.len());
        JudgmentParseError {
            reason,
            snippet: candidate[..cut].to_string(),
        }
    };
    serde_json::from_str(candidate).map_err(|e| err(e.to_string()))
}
