//! A single rubric criterion and its JSON wire form.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// How a criterion is evaluated against a response.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CriterionKind {
    /// Checked by a registered rule checker (string/format predicates).
    Verifiable {
        /// Registry key, e.g. `punctuation:no_comma`.
        checker_id: String,
        /// Checker arguments, e.g. `{"letter": "g", "min": 2}`.
        params: BTreeMap<String, serde_json::Value>,
    },
    /// Judged by a language-model grader against the criterion text.
    Semantic,
}

impl CriterionKind {
    pub fn is_verifiable(&self) -> bool {
        matches!(self, CriterionKind::Verifiable { .. })
    }
}

/// Where a criterion came from within the synthesis flow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// Produced by one generator model in the candidate stage.
    Candidate { source_model: String },
    /// Survived aggregation into the base rubric.
    Base,
    /// Added by the difficulty-evolution stage.
    Evolved,
    /// Hand-written or loaded from an external file.
    Manual,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Candidate { source_model } => write!(f, "candidate:{source_model}"),
            Provenance::Base => f.write_str("base"),
            Provenance::Evolved => f.write_str("evolved"),
            Provenance::Manual => f.write_str("manual"),
        }
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "base" => Ok(Provenance::Base),
            "evolved" => Ok(Provenance::Evolved),
            "manual" => Ok(Provenance::Manual),
            other => match other.strip_prefix("candidate:") {
                Some(model) if !model.is_empty() => Ok(Provenance::Candidate {
                    source_model: model.to_string(),
                }),
                _ => Err(format!("unrecognized provenance `{other}`")),
            },
        }
    }
}

/// One weighted, binary-checkable requirement within a rubric.
///
/// Weights are integers: positive weights reward desired behaviour, negative
/// weights penalize pitfalls when the described failure is present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "CriterionWire", into = "CriterionWire")]
pub struct Criterion {
    /// Identifier, unique within its rubric.
    pub id: String,
    /// 2-5 word summary of the requirement.
    pub title: String,
    /// The checkable requirement itself.
    pub description: String,
    /// Integer weight; sign encodes reward vs. penalty.
    pub weight: i32,
    pub kind: CriterionKind,
    pub provenance: Provenance,
}

impl Criterion {
    /// A semantic criterion with `Manual` provenance.
    pub fn semantic(id: impl Into<String>, title: impl Into<String>, description: impl Into<String>, weight: i32) -> Self {
        Criterion {
            id: id.into(),
            title: title.into(),
            description: description.into(),
            weight,
            kind: CriterionKind::Semantic,
            provenance: Provenance::Manual,
        }
    }

    /// A verifiable criterion with `Manual` provenance.
    pub fn verifiable(
        id: impl Into<String>,
        title: impl Into<String>,
        description: impl Into<String>,
        weight: i32,
        checker_id: impl Into<String>,
        params: BTreeMap<String, serde_json::Value>,
    ) -> Self {
        Criterion {
            id: id.into(),
            title: title.into(),
            description: description.into(),
            weight,
            kind: CriterionKind::Verifiable {
                checker_id: checker_id.into(),
                params,
            },
            provenance: Provenance::Manual,
        }
    }
}

/// Stable identifier for the criterion at position `ordinal` of a stage's
/// output for one query. Re-running a stage on the same input reproduces the
/// same ids, which keeps resumed runs byte-identical to uninterrupted ones.
pub fn stable_criterion_id(query_id: &str, stage_label: &str, ordinal: usize) -> String {
    let mut hasher = Sha256::new();
    hasher.update(query_id.as_bytes());
    hasher.update([0x1f]);
    hasher.update(stage_label.as_bytes());
    hasher.update([0x1f]);
    hasher.update(ordinal.to_string().as_bytes());
    let digest = hasher.finalize();
    hex::encode(&digest[..8])
}

/// Flat JSON form shared by dataset files and model-facing schemas.
///
/// `title`, `description` and `weight` are required; everything else is
/// optional so hand-written items round-trip untouched.
#[derive(Serialize, Deserialize)]
struct CriterionWire {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    id: String,
    title: String,
    description: String,
    weight: i32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    checker_id: Option<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    params: BTreeMap<String, serde_json::Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<String>,
}

impl TryFrom<CriterionWire> for Criterion {
    type Error = String;

    fn try_from(wire: CriterionWire) -> Result<Self, Self::Error> {
        let kind = match (wire.kind.as_deref(), wire.checker_id) {
            (Some("verifiable"), Some(checker_id)) | (None, Some(checker_id)) => {
                CriterionKind::Verifiable {
                    checker_id,
                    params: wire.params,
                }
            }
            (Some("verifiable"), None) => {
                return Err("verifiable criterion missing `checker_id`".to_string())
            }
            (Some("semantic") | None, None) => {
                if !wire.params.is_empty() {
                    return Err("`params` given on a non-verifiable criterion".to_string());
                }
                CriterionKind::Semantic
            }
            (Some("semantic"), Some(_)) => {
                return Err("`checker_id` given on a semantic criterion".to_string())
            }
            (Some(other), _) => return Err(format!("unrecognized criterion kind `{other}`")),
        };
        let provenance = match wire.provenance {
            Some(p) => p.parse()?,
            None => Provenance::Manual,
        };
        Ok(Criterion {
            id: wire.id,
            title: wire.title,
            description: wire.description,
            weight: wire.weight,
            kind,
            provenance,
        })
    }
}

impl From<Criterion> for CriterionWire {
    fn from(c: Criterion) -> Self {
        let (kind, checker_id, params) = match c.kind {
            CriterionKind::Verifiable { checker_id, params } => {
                ("verifiable", Some(checker_id), params)
            }
            CriterionKind::Semantic => ("semantic", None, BTreeMap::new()),
        };
        CriterionWire {
            id: c.id,
            title: c.title,
            description: c.description,
            weight: c.weight,
            kind: Some(kind.to_string()),
            checker_id,
            params,
            provenance: Some(c.provenance.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_round_trip_preserves_semantic_criterion() {
        let c = Criterion::semantic("c1", "Single Final Answer", "Provides one final option.", 8);
        let json = serde_json::to_string(&c).unwrap();
        let back: Criterion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn wire_round_trip_preserves_verifiable_criterion() {
        let mut params = BTreeMap::new();
        params.insert("letter".to_string(), serde_json::json!("g"));
        params.insert("min".to_string(), serde_json::json!(2));
        let c = Criterion::verifiable(
            "c2",
            "Letter Frequency Bound",
            "letters:letter_counting2",
            10,
            "letters:letter_counting2",
            params,
        );
        let json = serde_json::to_string(&c).unwrap();
        let back: Criterion = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn minimal_wire_form_defaults_to_semantic_manual() {
        let c: Criterion = serde_json::from_str(
            r#"{"title":"Cover Key Clues","description":"Uses prompt evidence.","weight":7}"#,
        )
        .unwrap();
        assert_eq!(c.kind, CriterionKind::Semantic);
        assert_eq!(c.provenance, Provenance::Manual);
        assert!(c.id.is_empty());
    }

    #[test]
    fn checker_id_without_kind_implies_verifiable() {
        let c: Criterion = serde_json::from_str(
            r#"{"title":"No Commas Anywhere","description":"punctuation:no_comma","weight":10,"checker_id":"punctuation:no_comma"}"#,
        )
        .unwrap();
        assert!(c.kind.is_verifiable());
    }

    #[test]
    fn verifiable_kind_without_checker_id_is_rejected() {
        let err = serde_json::from_str::<Criterion>(
            r#"{"title":"Broken Checker Item","description":"x","weight":1,"kind":"verifiable"}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("checker_id"), "{err}");
    }

    #[test]
    fn params_on_semantic_criterion_are_rejected() {
        let err = serde_json::from_str::<Criterion>(
            r#"{"title":"Stray Params Item","description":"x","weight":1,"params":{"min":1}}"#,
        )
        .unwrap_err();
        assert!(err.to_string().contains("params"), "{err}");
    }

    #[test]
    fn provenance_string_forms_round_trip() {
        for p in [
            Provenance::Base,
            Provenance::Evolved,
            Provenance::Manual,
            Provenance::Candidate {
                source_model: "m1".to_string(),
            },
        ] {
            let text = p.to_string();
            assert_eq!(text.parse::<Provenance>().unwrap(), p);
        }
        assert!("candidate:".parse::<Provenance>().is_err());
        assert!("unknown".parse::<Provenance>().is_err());
    }

    #[test]
    fn stable_ids_are_deterministic_and_distinct() {
        let a = stable_criterion_id("q01", "base", 0);
        let b = stable_criterion_id("q01", "base", 0);
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);
        assert_ne!(a, stable_criterion_id("q01", "base", 1));
        assert_ne!(a, stable_criterion_id("q01", "evolved", 0));
        assert_ne!(a, stable_criterion_id("q02", "base", 0));
    }
}
