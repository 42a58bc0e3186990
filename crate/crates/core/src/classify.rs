//! Routing criteria to rule checkers vs. LLM judging.
//!
//! Instruction-following corpora encode machine-checkable constraints by
//! using the checker id itself as the criterion description (for example
//! `punctuation:no_comma`). Classification recognizes that convention and
//! retags such criteria as verifiable; everything else stays semantic.

use std::collections::{BTreeSet, HashSet};

use thiserror::Error;

use crate::criterion::{Criterion, CriterionKind};

/// Answers "is this checker id registered?" without tying classification to
/// any particular checker implementation.
pub trait CheckerLookup {
    fn contains_checker(&self, checker_id: &str) -> bool;
}

impl CheckerLookup for BTreeSet<String> {
    fn contains_checker(&self, checker_id: &str) -> bool {
        self.contains(checker_id)
    }
}

impl CheckerLookup for HashSet<String> {
    fn contains_checker(&self, checker_id: &str) -> bool {
        self.contains(checker_id)
    }
}

impl<T: CheckerLookup + ?Sized> CheckerLookup for &T {
    fn contains_checker(&self, checker_id: &str) -> bool {
        (*self).contains_checker(checker_id)
    }
}

#[derive(Debug, Error)]
pub enum ClassifyError {
    #[error("UNKNOWN_CHECKER: criterion `{criterion_id}` names unregistered checker `{checker_id}`")]
    UnknownChecker {
        checker_id: String,
        criterion_id: String,
    },
}

/// True when `text` has the `family:name` shape of a checker id
/// (lowercase ASCII letters, digits, and underscores on both sides).
pub fn looks_like_checker_id(text: &str) -> bool {
    let Some((family, name)) = text.split_once(':') else {
        return false;
    };
    let valid = |part: &str| {
        !part.is_empty()
            && part
                .chars()
                .all(|ch| ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_')
    };
    valid(family) && valid(name)
}

/// Retags a criterion whose description is a registered checker id as
/// verifiable. Criteria already tagged verifiable are returned unchanged, so
/// the operation is idempotent. A description that has checker-id shape but
/// is not registered is an error: grading it semantically would judge the
/// literal id string, which is never what the rubric meant.
pub fn classify_criterion_kind<L>(criterion: &Criterion, lookup: &L) -> Result<Criterion, ClassifyError>
where
    L: CheckerLookup + ?Sized,
{
    if criterion.kind.is_verifiable() {
        return Ok(criterion.clone());
    }
    let trimmed = criterion.description.trim();
    if !looks_like_checker_id(trimmed) {
        return Ok(criterion.clone());
    }
    if !lookup.contains_checker(trimmed) {
        return Err(ClassifyError::UnknownChecker {
            checker_id: trimmed.to_string(),
            criterion_id: criterion.id.clone(),
        });
    }
    let mut classified = criterion.clone();
    classified.kind = CriterionKind::Verifiable {
        checker_id: trimmed.to_string(),
        params: std::collections::BTreeMap::new(),
    };
    Ok(classified)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn registry() -> BTreeSet<String> {
        [
            "detectable_content:number_placeholders",
            "letters:letter_counting2",
            "punctuation:no_comma",
            "content:exact_phrase",
            "content:starts_with",
        ]
        .into_iter()
        .map(str::to_string)
        .collect()
    }

    #[test]
    fn checker_id_description_becomes_verifiable() {
        let c = Criterion::semantic("c1", "No Commas Allowed", "punctuation:no_comma", 10);
        let classified = classify_criterion_kind(&c, &registry()).unwrap();
        match classified.kind {
            CriterionKind::Verifiable { checker_id, params } => {
                assert_eq!(checker_id, "punctuation:no_comma");
                assert!(params.is_empty());
            }
            CriterionKind::Semantic => panic!("expected verifiable"),
        }
    }

    #[test]
    fn prose_description_stays_semantic() {
        let c = Criterion::semantic(
            "c1",
            "Cites Prompt Evidence",
            "Answer based on key information from the prompt rather than common sense speculation.",
            7,
        );
        let classified = classify_criterion_kind(&c, &registry()).unwrap();
        assert_eq!(classified, c);
    }

    #[test]
    fn unregistered_checker_shape_is_an_error() {
        let c = Criterion::semantic("c9", "Letter Counting Rule", "letters:letter_counting9", 5);
        let err = classify_criterion_kind(&c, &registry()).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("UNKNOWN_CHECKER"), "{text}");
        assert!(text.contains("letters:letter_counting9"), "{text}");
    }

    #[test]
    fn classification_is_idempotent() {
        let c = Criterion::semantic("c1", "Placeholder Count Rule", "detectable_content:number_placeholders", 8);
        let once = classify_criterion_kind(&c, &registry()).unwrap();
        let twice = classify_criterion_kind(&once, &registry()).unwrap();
        assert_eq!(once, twice);
    }

    #[test]
    fn already_verifiable_criteria_are_left_alone() {
        let mut params = std::collections::BTreeMap::new();
        params.insert("min".to_string(), serde_json::json!(2));
        let c = Criterion::verifiable(
            "c1",
            "Placeholder Count Rule",
            "Include at least two square-bracket placeholders.",
            8,
            "detectable_content:number_placeholders",
            params,
        );
        let classified = classify_criterion_kind(&c, &registry()).unwrap();
        assert_eq!(classified, c, "params and checker must be preserved");
    }

    #[test]
    fn checker_id_shape_is_strict() {
        assert!(looks_like_checker_id("punctuation:no_comma"));
        assert!(looks_like_checker_id("letters:letter_counting2"));
        assert!(!looks_like_checker_id("No colon here"));
        assert!(!looks_like_checker_id("Mixed Case:no_comma"));
        assert!(!looks_like_checker_id(":missing_family"));
        assert!(!looks_like_checker_id("missing_name:"));
        assert!(!looks_like_checker_id("two:colons:here"));
        assert!(!looks_like_checker_id("has space:no_comma"));
    }
}
