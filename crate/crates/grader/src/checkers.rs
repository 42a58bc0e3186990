//! Rule checkers: deterministic string predicates for verifiable criteria.
//!
//! Checker ids follow the `family:name` convention used by
//! instruction-following corpora, and the standard registry covers the five
//! constraint families those corpora rely on. All checkers are pure
//! functions of `(params, response_text)`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::{CheckerLookup, Criterion, CriterionKind};

use crate::judgment::{Judgment, JudgmentSource};

/// A checker invocation: which checker, with which arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckerSpec {
    pub checker_id: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
}

impl CheckerSpec {
    /// The spec embedded in a verifiable criterion, if it is one.
    pub fn from_criterion(criterion: &Criterion) -> Option<CheckerSpec> {
        match &criterion.kind {
            CriterionKind::Verifiable { checker_id, params } => Some(CheckerSpec {
                checker_id: checker_id.clone(),
                params: params.clone(),
            }),
            CriterionKind::Semantic => None,
        }
    }
}

/// A checker's verdict plus its human-readable reason.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub passed: bool,
    pub explanation: String,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("UNKNOWN_CHECKER: `{checker_id}` is not registered")]
    UnknownChecker { checker_id: String },
    #[error("MISSING_PARAM: checker `{checker_id}` needs `{param}`")]
    MissingParam { checker_id: String, param: String },
    #[error("INVALID_PARAM: checker `{checker_id}` param `{param}`: {reason}")]
    InvalidParam {
        checker_id: String,
        param: String,
        reason: String,
    },
}

type CheckFn = fn(&str, &BTreeMap<String, serde_json::Value>, &str) -> Result<CheckOutcome, CheckError>;

/// Registered checkers, looked up by id.
pub struct CheckerRegistry {
    checkers: BTreeMap<&'static str, CheckFn>,
}

impl CheckerRegistry {
    pub fn empty() -> Self {
        CheckerRegistry {
            checkers: BTreeMap::new(),
        }
    }

    /// The five standard checkers.
    pub fn standard() -> Self {
        let mut registry = CheckerRegistry::empty();
        registry.register("detectable_content:number_placeholders", check_number_placeholders);
        registry.register("letters:letter_counting2", check_letter_counting);
        registry.register("punctuation:no_comma", check_no_comma);
        registry.register("content:exact_phrase", check_exact_phrase);
        registry.register("content:starts_with", check_starts_with);
        registry
    }

    pub fn register(&mut self, checker_id: &'static str, check: CheckFn) {
        self.checkers.insert(checker_id, check);
    }

    pub fn contains(&self, checker_id: &str) -> bool {
        self.checkers.contains_key(checker_id)
    }

    pub fn checker_ids(&self) -> Vec<&'static str> {
        self.checkers.keys().copied().collect()
    }

    pub fn check(&self, spec: &CheckerSpec, response_text: &str) -> Result<CheckOutcome, CheckError> {
        let check = self
            .checkers
            .get(spec.checker_id.as_str())
            .ok_or_else(|| CheckError::UnknownChecker {
                checker_id: spec.checker_id.clone(),
            })?;
        check(&spec.checker_id, &spec.params, response_text)
    }
}

impl CheckerLookup for CheckerRegistry {
    fn contains_checker(&self, checker_id: &str) -> bool {
        self.contains(checker_id)
    }
}

/// Runs a rule checker and wraps the outcome as a [`Judgment`].
///
/// The returned judgment has an empty `criterion_id`; the caller grading a
/// rubric fills in the id of the criterion it evaluated.
pub fn check_verifiable(
    registry: &CheckerRegistry,
    spec: &CheckerSpec,
    response_text: &str,
) -> Result<Judgment, CheckError> {
    let outcome = registry.check(spec, response_text)?;
    Ok(Judgment {
        criterion_id: String::new(),
        criteria_met: outcome.passed,
        explanation: outcome.explanation,
        grader_id: format!("rule:{}", spec.checker_id),
        source: JudgmentSource::Rule,
        error: None,
    })
}

fn get_count(
    checker_id: &str,
    params: &BTreeMap<String, serde_json::Value>,
    param: &str,
) -> Result<u64, CheckError> {
    let value = params.get(param).ok_or_else(|| CheckError::MissingParam {
        checker_id: checker_id.to_string(),
        param: param.to_string(),
    })?;
    value.as_u64().ok_or_else(|| CheckError::InvalidParam {
        checker_id: checker_id.to_string(),
        param: param.to_string(),
        reason: format!("expected a non-negative integer, got {value}"),
    })
}

fn get_string<'p>(
    checker_id: &str,
    params: &'p BTreeMap<String, serde_json::Value>,
    param: &str,
) -> Result<&'p str, CheckError> {
    let value = params.get(param).ok_or_else(|| CheckError::MissingParam {
        checker_id: checker_id.to_string(),
        param: param.to_string(),
    })?;
    let text = value.as_str().ok_or_else(|| CheckError::InvalidParam {
        checker_id: checker_id.to_string(),
        param: param.to_string(),
        reason: format!("expected a string, got {value}"),
    })?;
    if text.is_empty() {
        return Err(CheckError::InvalidParam {
            checker_id: checker_id.to_string(),
            param: param.to_string(),
            reason: "must not be empty".to_string(),
        });
    }
    Ok(text)
}

/// `detectable_content:number_placeholders {min}` — at least `min`
/// square-bracket placeholders like `[address]`. Spans are counted in one
/// left-to-right pass with no nesting: each `[` closes at the next `]`, and
/// only non-empty spans count.
fn check_number_placeholders(
    checker_id: &str,
    params: &BTreeMap<String, serde_json::Value>,
    text: &str,
) -> Result<CheckOutcome, CheckError> {
    let min = get_count(checker_id, params, "min")?;
    let mut count = 0u64;
    let mut rest = text;
    while let Some(open) = rest.find('[') {
        let after_open = &rest[open + 1..];
        match after_open.find(']') {
            Some(close) => {
                if close > 0 {
                    count += 1;
                }
                rest = &after_open[close + 1..];
            }
            None => break,
        }
    }
    Ok(CheckOutcome {
        passed: count >= min,
        explanation: format!("found {count} bracketed placeholder(s); at least {min} required"),
    })
}

/// `letters:letter_counting2 {letter, min}` — the letter appears at least
/// `min` times, case-insensitively, anywhere in the response.
fn check_letter_counting(
    checker_id: &str,
    params: &BTreeMap<String, serde_json::Value>,
    text: &str,
) -> Result<CheckOutcome, CheckError> {
    let letter = get_string(checker_id, params, "letter")?;
    if letter.chars().count() != 1 {
        return Err(CheckError::InvalidParam {
            checker_id: checker_id.to_string(),
            param: "letter".to_string(),
            reason: format!("expected a single character, got {letter:?}"),
        });
    }
    let min = get_count(checker_id, params, "min")?;
    let needle = letter.to_lowercase();
    let count = text.to_lowercase().matches(&needle).count() as u64;
    Ok(CheckOutcome {
        passed: count >= min,
        explanation: format!("letter {letter:?} appears {count} time(s); at least {min} required"),
    })
}

/// `punctuation:no_comma {}` — the response contains no ASCII comma.
fn check_no_comma(
    _checker_id: &str,
    _params: &BTreeMap<String, serde_json::Value>,
    text: &str,
) -> Result<CheckOutcome, CheckError> {
    let count = text.matches(',').count();
    Ok(CheckOutcome {
        passed: count == 0,
        explanation: if count == 0 {
            "no commas present".to_string()
        } else {
            format!("found {count} comma(s)")
        },
    })
}

/// `content:exact_phrase {phrase}` — case-sensitive substring match.
fn check_exact_phrase(
    checker_id: &str,
    params: &BTreeMap<String, serde_json::Value>,
    text: &str,
) -> Result<CheckOutcome, CheckError> {
    let phrase = get_string(checker_id, params, "phrase")?;
    let passed = text.contains(phrase);
    Ok(CheckOutcome {
        passed,
        explanation: if passed {
            format!("phrase {phrase:?} present")
        } else {
            format!("phrase {phrase:?} absent")
        },
    })
}

/// `content:starts_with {prefix}` — the response, after leading whitespace,
/// begins with the prefix (case-sensitive).
fn check_starts_with(
    checker_id: &str,
    params: &BTreeMap<String, serde_json::Value>,
    text: &str,
) -> Result<CheckOutcome, CheckError> {
    let prefix = get_string(checker_id, params, "prefix")?;
    let passed = text.trim_start().starts_with(prefix);
    Ok(CheckOutcome {
        passed,
        explanation: if passed {
            format!("response begins with {prefix:?}")
        } else {
            format!("response does not begin with {prefix:?}")
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(checker_id: &str, params: serde_json::Value) -> CheckerSpec {
        CheckerSpec {
            checker_id: checker_id.to_string(),
            params: serde_json::from_value(params).unwrap(),
        }
    }

    fn run(checker_id: &str, params: serde_json::Value, text: &str) -> CheckOutcome {
        CheckerRegistry::standard()
            .check(&spec(checker_id, params), text)
            .unwrap()
    }

    #[test]
    fn number_placeholders_counts_non_empty_spans() {
        let id = "detectable_content:number_placeholders";
        assert!(run(id, serde_json::json!({"min": 2}), "Send to [address] by [date].").passed);
        assert!(!run(id, serde_json::json!({"min": 3}), "Send to [address] by [date].").passed);
        // Empty spans do not count.
        assert!(!run(id, serde_json::json!({"min": 1}), "empty [] brackets").passed);
        // No nesting: one scan, "[a[b]" closes at the first ']'.
        let outcome = run(id, serde_json::json!({"min": 1}), "[a[b]c]");
        assert!(outcome.passed);
        assert!(outcome.explanation.contains("found 1"));
        // Unterminated bracket contributes nothing.
        assert!(!run(id, serde_json::json!({"min": 1}), "open [ never closed").passed);
        // Boundary: exactly min.
        assert!(run(id, serde_json::json!({"min": 1}), "[x]").passed);
        assert!(run(id, serde_json::json!({"min": 0}), "no brackets at all").passed);
    }

    #[test]
    fn letter_counting_is_case_insensitive() {
        let id = "letters:letter_counting2";
        let outcome = run(id, serde_json::json!({"letter": "g", "min": 2}), "Giggling geese");
        assert!(outcome.passed);
        assert!(outcome.explanation.contains("appears 5 time(s)"));
        assert!(!run(id, serde_json::json!({"letter": "z", "min": 1}), "none here").passed);
        // Boundary: exactly min occurrences.
        assert!(run(id, serde_json::json!({"letter": "G", "min": 2}), "gag").passed);
        assert!(!run(id, serde_json::json!({"letter": "g", "min": 3}), "gag").passed);
    }

    #[test]
    fn no_comma_flags_any_ascii_comma() {
        let id = "punctuation:no_comma";
        assert!(run(id, serde_json::json!({}), "clean sentence without pause").passed);
        let outcome = run(id, serde_json::json!({}), "one, two, three");
        assert!(!outcome.passed);
        assert!(outcome.explanation.contains("2 comma(s)"));
        assert!(run(id, serde_json::json!({}), "").passed);
    }

    #[test]
    fn exact_phrase_is_case_sensitive() {
        let id = "content:exact_phrase";
        let params = serde_json::json!({"phrase": "dependent rubor"});
        assert!(run(id, params.clone(), "Elevation pallor and dependent rubor are signs.").passed);
        assert!(!run(id, serde_json::json!({"phrase": "Dependent Rubor"}), "dependent rubor").passed);
        assert!(!run(id, params, "unrelated text").passed);
    }

    #[test]
    fn starts_with_skips_leading_whitespace_only() {
        let id = "content:starts_with";
        let params = serde_json::json!({"prefix": "Disclaimer:"});
        assert!(run(id, params.clone(), "Disclaimer: not medical advice.").passed);
        assert!(run(id, params.clone(), "\n  Disclaimer: indented").passed);
        assert!(!run(id, params.clone(), "Note. Disclaimer: too late").passed);
        assert!(!run(id, params, "disclaimer: wrong case").passed);
    }

    #[test]
    fn unknown_checker_is_reported() {
        let err = CheckerRegistry::standard()
            .check(&spec("letters:letter_counting9", serde_json::json!({})), "x")
            .unwrap_err();
        assert!(err.to_string().contains("UNKNOWN_CHECKER"), "{err}");
    }

    #[test]
    fn missing_and_invalid_params_are_distinguished() {
        let registry = CheckerRegistry::standard();
        let missing = registry
            .check(&spec("letters:letter_counting2", serde_json::json!({"letter": "g"})), "x")
            .unwrap_err();
        assert!(missing.to_string().contains("MISSING_PARAM"), "{missing}");
        let invalid = registry
            .check(
                &spec("letters:letter_counting2", serde_json::json!({"letter": "gg", "min": 1})),
                "x",
            )
            .unwrap_err();
        assert!(invalid.to_string().contains("INVALID_PARAM"), "{invalid}");
        let negative = registry
            .check(
                &spec("detectable_content:number_placeholders", serde_json::json!({"min": -1})),
                "x",
            )
            .unwrap_err();
        assert!(negative.to_string().contains("INVALID_PARAM"), "{negative}");
    }

    #[test]
    fn check_verifiable_wraps_outcome_as_rule_judgment() {
        let judgment = check_verifiable(
            &CheckerRegistry::standard(),
            &spec("punctuation:no_comma", serde_json::json!({})),
            "no pauses here",
        )
        .unwrap();
        assert!(judgment.criteria_met);
        assert_eq!(judgment.grader_id, "rule:punctuation:no_comma");
        assert_eq!(judgment.source, JudgmentSource::Rule);
        assert!(judgment.error.is_none());
        assert!(judgment.criterion_id.is_empty(), "caller assigns the criterion id");
    }

    #[test]
    fn registry_serves_checker_lookup() {
        let registry = CheckerRegistry::standard();
        assert!(rubricforge_core::CheckerLookup::contains_checker(
            &registry,
            "content:exact_phrase"
        ));
        assert!(!rubricforge_core::CheckerLookup::contains_checker(
            &registry,
            "letters:letter_counting9"
        ));
        assert_eq!(registry.checker_ids().len(), 5);
    }
}
