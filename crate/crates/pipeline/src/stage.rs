//! Shared plumbing for the synthesis stages: the stage error type, the JSON
//! shape rubrics take inside prompts, and criterion-kind resolution.

use serde::Serialize;
use thiserror::Error;

use rubricforge_core::{
    classify_criterion_kind, CheckerLookup, Criterion, MergeError, Strictness,
};
use rubricforge_gateway::{GatewayError, RenderError};
use rubricforge_grader::GradeError;

#[derive(Debug, Error)]
pub enum StageError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error(transparent)]
    Template(#[from] RenderError),
    #[error(
        "GENERATION_FAILED: query `{query_id}` source `{source_label}` after {attempts} attempt(s): {detail}"
    )]
    Generation {
        query_id: String,
        source_label: String,
        attempts: u32,
        detail: String,
    },
    #[error("NOT_ENOUGH_CANDIDATES: query `{query_id}` has {have} candidate rubric(s); 2 required")]
    NotEnoughCandidates { query_id: String, have: usize },
    #[error("AGGREGATION_FAILED: query `{query_id}`: {detail}")]
    Aggregation { query_id: String, detail: String },
    #[error("EVOLUTION_FAILED: query `{query_id}`: {detail}")]
    Evolution { query_id: String, detail: String },
    #[error(transparent)]
    Grade(#[from] GradeError),
    #[error(transparent)]
    Merge(#[from] MergeError),
}

#[derive(Serialize)]
struct PromptItem<'a> {
    title: &'a str,
    description: &'a str,
    weight: i32,
}

/// Renders criteria the way synthesis prompts carry rubrics: a pretty JSON
/// array of `{title, description, weight}` objects, nothing else.
pub fn rubric_prompt_json(criteria: &[Criterion]) -> String {
    let items: Vec<PromptItem> = criteria
        .iter()
        .map(|c| PromptItem {
            title: &c.title,
            description: &c.description,
            weight: c.weight,
        })
        .collect();
    serde_json::to_string_pretty(&items).expect("plain strings and integers serialize")
}

/// Resolves criterion kinds against the checker registry.
///
/// A description that is exactly a registered checker id becomes a
/// verifiable criterion. Unregistered checker-shaped descriptions are errors
/// under [`Strictness::Strict`] (returned for the repair loop) and kept
/// semantic with a warning under [`Strictness::Lenient`].
pub fn resolve_kinds<L: CheckerLookup>(
    criteria: Vec<Criterion>,
    registry: &L,
    strictness: Strictness,
) -> Result<Vec<Criterion>, Vec<String>> {
    let mut resolved = Vec::with_capacity(criteria.len());
    let mut issues = Vec::new();
    for criterion in criteria {
        match classify_criterion_kind(&criterion, registry) {
            Ok(criterion) => resolved.push(criterion),
            Err(err) if strictness == Strictness::Lenient => {
                tracing::warn!(
                    criterion_id = %criterion.id,
                    error = %err,
                    "criterion kept semantic: checker-shaped description is unregistered"
                );
                resolved.push(criterion);
            }
            Err(err) => issues.push(format!("{}: {err}", criterion.id)),
        }
    }
    if issues.is_empty() {
        Ok(resolved)
    } else {
        Err(issues)
    }
}
