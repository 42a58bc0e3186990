//! Extracting rubric arrays from raw model output.
//!
//! Generator models are instructed to reply with a JSON array inside a
//! Markdown code fence, but replies drift: fences go missing, weights arrive
//! as strings. Parsing is tolerant of that drift while refusing anything
//! that is not a criterion list.

use thiserror::Error;

use crate::criterion::{Criterion, CriterionKind, Provenance};

/// The contents of the first ````` ``` ````-fenced block, if any.
///
/// The language tag on the opening fence is ignored. An unterminated block
/// (truncated reply) yields everything after the opening fence.
pub fn first_fenced_block(text: &str) -> Option<&str> {
    let open = text.find("```")?;
    let after = &text[open + 3..];
    match after.find('\n') {
        Some(newline) => {
            let body = &after[newline + 1..];
            match body.find("\n```") {
                Some(end) => Some(&body[..end]),
                None => Some(body),
            }
        }
        // Opening fence with no newline after it: single-line reply like
        // ```[1] ``` — take whatever sits before the closing fence.
        None => match after.find("```") {
            Some(end) => Some(&after[..end]),
            None => Some(after),
        },
    }
}

/// The best JSON candidate in a reply: the first fenced block when present,
/// otherwise the whole text trimmed.
pub fn json_candidate(text: &str) -> &str {
    match first_fenced_block(text) {
        Some(block) => block.trim(),
        None => text.trim(),
    }
}

#[derive(Debug, Error)]
pub enum RubricParseError {
    #[error("NO_JSON_FOUND: reply does not contain a JSON array of criteria (starts {snippet:?})")]
    NoJsonFound { snippet: String },
    #[error("MALFORMED_ITEM: item {index} {reason}")]
    MalformedItem { index: usize, reason: String },
}

fn snippet(text: &str) -> String {
    let trimmed = text.trim();
    let cut = trimmed
        .char_indices()
        .nth(60)
        .map(|(i, _)| i)
        .unwrap_or(trimmed.len());
    trimmed[..cut].to_string()
}

fn extract_weight(item: &serde_json::Value) -> Result<i32, String> {
    let value = item.get("weight").ok_or("is missing `weight`")?;
    let as_i64 = match value {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Some(i)
            } else {
                // Accept 7.0 but not 7.5: models sometimes emit floats for
                // integral weights.
                n.as_f64()
                    .filter(|f| f.fract() == 0.0 && f.abs() < i64::MAX as f64)
                    .map(|f| f as i64)
            }
        }
        serde_json::Value::String(s) => s.trim().parse::<i64>().ok(),
        _ => None,
    };
    let weight = as_i64.ok_or_else(|| format!("has non-integer `weight` {value}"))?;
    i32::try_from(weight).map_err(|_| format!("has `weight` {weight} outside the supported range"))
}

/// Parses a model reply into criteria.
///
/// Reads the schema fields `title`, `description` and `weight` from each
/// array element; anything extra the model volunteered is dropped. Weights
/// may arrive as integers, integral floats, or integer strings. The returned
/// criteria get provisional ids `c1..cN`, semantic kind, and manual
/// provenance; callers retag and re-identify them for their own stage.
pub fn parse_rubric_json(text: &str) -> Result<Vec<Criterion>, RubricParseError> {
    let candidate = json_candidate(text);
    let no_json = || RubricParseError::NoJsonFound {
        snippet: snippet(candidate),
    };
    let value: serde_json::Value = serde_json::from_str(candidate).map_err(|_| no_json())?;
    let items = value.as_array().ok_or_else(no_json)?;

    let mut criteria = Vec::with_capacity(items.len());
    for (index, item) in items.iter().enumerate() {
        let malformed = |reason: String| RubricParseError::MalformedItem { index, reason };
        if !item.is_object() {
            return Err(malformed("is not an object".to_string()));
        }
        let title = item
            .get("title")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| malformed("is missing a string `title`".to_string()))?;
        let description = item
            .get("description")
            .and_then(serde_json::Value::as_str)
            .ok_or_else(|| malformed("is missing a string `description`".to_string()))?;
        let weight = extract_weight(item).map_err(malformed)?;
        criteria.push(Criterion {
            id: format!("c{}", index + 1),
            title: title.to_string(),
            description: description.to_string(),
            weight,
            kind: CriterionKind::Semantic,
            provenance: Provenance::Manual,
        });
    }
    Ok(criteria)
}

#[cfg(test)]
mod tests {
    use super::*;

    const FENCED_PENALTY_PAIR: &str = r#"```json
[  {
        "title":"Wrong Output Format",
        "description":"Penalize if the response includes any non-JSON text, missing the required Markdown code block wrapper.",
        "weight":-10
    },
    {
        "title":"Missing Key Constraint",
        "description":"Penalize if any explicit constraint from the question is ignored or contradicted.",
        "weight":-8
    }
]
```"#;

    #[test]
    fn parses_fenced_penalty_array() {
        let criteria = parse_rubric_json(FENCED_PENALTY_PAIR).unwrap();
        assert_eq!(criteria.len(), 2);
        assert_eq!(criteria[0].title, "Wrong Output Format");
        assert_eq!(criteria[0].weight, -10);
        assert_eq!(criteria[1].weight, -8);
        assert_eq!(criteria[0].id, "c1");
        assert_eq!(criteria[1].id, "c2");
    }

    #[test]
    fn fenced_and_unfenced_parse_identically() {
        let fenced = parse_rubric_json(FENCED_PENALTY_PAIR).unwrap();
        let bare = FENCED_PENALTY_PAIR
            .trim_start_matches("```json\n")
            .trim_end_matches("\n```");
        let unfenced = parse_rubric_json(bare).unwrap();
        assert_eq!(fenced, unfenced);
    }

    #[test]
    fn leading_prose_before_fence_is_ignored() {
        let reply = format!("Here is the rubric you asked for:\n\n{FENCED_PENALTY_PAIR}\nHope this helps!");
        let criteria = parse_rubric_json(&reply).unwrap();
        assert_eq!(criteria.len(), 2);
    }

    #[test]
    fn prose_without_json_is_no_json_found() {
        let err = parse_rubric_json("I cannot produce a rubric for this request.").unwrap_err();
        assert!(matches!(err, RubricParseError::NoJsonFound { .. }), "{err}");
    }

    #[test]
    fn json_object_instead_of_array_is_no_json_found() {
        let err = parse_rubric_json(r#"{"title":"x","description":"y","weight":1}"#).unwrap_err();
        assert!(matches!(err, RubricParseError::NoJsonFound { .. }));
    }

    #[test]
    fn string_and_float_weights_are_coerced_to_integers() {
        let reply = r#"[
            {"title":"Weight As String","description":"d","weight":"7"},
            {"title":"Weight As Float","description":"d","weight":5.0}
        ]"#;
        let criteria = parse_rubric_json(reply).unwrap();
        assert_eq!(criteria[0].weight, 7);
        assert_eq!(criteria[1].weight, 5);
    }

    #[test]
    fn fractional_weight_is_malformed() {
        let err =
            parse_rubric_json(r#"[{"title":"Bad Weight Item","description":"d","weight":7.5}]"#)
                .unwrap_err();
        match err {
            RubricParseError::MalformedItem { index, .. } => assert_eq!(index, 0),
            other => panic!("expected MalformedItem, got {other}"),
        }
    }

    #[test]
    fn missing_field_reports_item_index() {
        let reply = r#"[
            {"title":"Complete Item Here","description":"d","weight":3},
            {"title":"No Description Item","weight":2}
        ]"#;
        let err = parse_rubric_json(reply).unwrap_err();
        match err {
            RubricParseError::MalformedItem { index, reason } => {
                assert_eq!(index, 1);
                assert!(reason.contains("description"), "{reason}");
            }
            other => panic!("expected MalformedItem, got {other}"),
        }
    }

    #[test]
    fn unterminated_fence_still_parses() {
        let reply = "```json\n[{\"title\":\"Truncated Reply Item\",\"description\":\"d\",\"weight\":1}]";
        let criteria = parse_rubric_json(reply).unwrap();
        assert_eq!(criteria.len(), 1);
    }

    #[test]
    fn empty_array_parses_to_no_criteria() {
        assert!(parse_rubric_json("```json\n[]\n```").unwrap().is_empty());
    }

    #[test]
    fn extra_fields_are_dropped() {
        let reply = r#"[{"title":"Extra Fields Item","description":"d","weight":4,"rationale":"because"}]"#;
        let criteria = parse_rubric_json(reply).unwrap();
        assert_eq!(criteria.len(), 1);
        assert_eq!(criteria[0].weight, 4);
    }
}
