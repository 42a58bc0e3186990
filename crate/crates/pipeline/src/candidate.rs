//! Stage 1: each generator model drafts a candidate rubric for a query from
//! one of its reference responses, with a bounded repair loop for replies
//! that fail to parse or validate.

use rubricforge_core::{
    parse_rubric_json, validate_criterion, validate_rubric, Criterion, Polarity, Provenance,
    QueryRecord, Reference, Rubric, RubricStage, ValidationProfile,
};
use rubricforge_gateway::{bindings, builtin, ChatMessage, LlmRequest, TemplateName};

use crate::config::ModelRef;
use crate::context::PipelineContext;
use crate::stage::{resolve_kinds, StageError};

/// A stage-1 rubric plus the stable identity of where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateRubric {
    /// `"{generator backend}:{generator model}:{reference model}"` — the
    /// deterministic sort key aggregation folds by.
    pub source: String,
    pub rubric: Rubric,
}

/// How a candidate half is validated inside the repair loop.
enum ValidationMode {
    /// Whole-rubric validation (criteria count, duplicate ids, s_max).
    FullRubric,
    /// Per-criterion validation only — used for the halves of a mixed
    /// rubric, whose counts only make sense combined.
    PerCriterion,
}

fn validation_issues(
    criteria: &[Criterion],
    query_id: &str,
    profile: &ValidationProfile,
    mode: &ValidationMode,
) -> Vec<String> {
    match mode {
        ValidationMode::FullRubric => {
            let rubric = Rubric::new(query_id, RubricStage::Candidate, criteria.to_vec());
            validate_rubric(&rubric, profile).error_lines()
        }
        ValidationMode::PerCriterion => criteria
            .iter()
            .flat_map(|criterion| validate_criterion(criterion, profile).error_lines())
            .collect(),
    }
}

async fn generate_with_template(
    ctx: &PipelineContext,
    query: &QueryRecord,
    reference: &Reference,
    generator: &ModelRef,
    source: &str,
    template: TemplateName,
    polarity: Polarity,
    mode: ValidationMode,
    tag_suffix: &str,
) -> Result<Vec<Criterion>, StageError> {
    let profile = ValidationProfile {
        polarity,
        ..ctx.config.profile
    };
    let prompt = builtin(template).render_strict(&bindings([
        ("query", query.prompt.as_str()),
        ("reference", reference.response.as_str()),
    ]))?;
    let mut messages = vec![ChatMessage::user(prompt)];
    let base_tag = format!("gen:{}:{source}:{tag_suffix}", query.id);
    let total_attempts = 1 + ctx.config.max_repair_attempts;
    let mut last_issues: Vec<String> = Vec::new();

    for attempt in 0..total_attempts {
        let seed_tag = if attempt == 0 {
            base_tag.clone()
        } else {
            format!("{base_tag}:repair{attempt}")
        };
        let request = LlmRequest::new(&generator.model, messages.clone())
            .with_temperature(ctx.config.gen_temperature)
            .with_max_tokens(ctx.config.gen_max_tokens)
            .with_seed_tag(seed_tag);
        let response = ctx.gateway.complete(&generator.backend_id, &request).await?;

        let issues = match parse_rubric_json(&response.text) {
            Err(err) => vec![err.to_string()],
            Ok(criteria) => {
                match resolve_kinds(criteria, ctx.grader.registry(), ctx.config.profile.strictness)
                {
                    Err(issues) => issues,
                    Ok(resolved) => {
                        let issues = validation_issues(&resolved, &query.id, &profile, &mode);
                        if issues.is_empty() {
                            return Ok(resolved);
                        }
                        issues
                    }
                }
            }
        };
        tracing::debug!(
            query_id = %query.id,
            source,
            attempt,
            issues = issues.len(),
            "candidate reply rejected"
        );
        messages.push(ChatMessage::assistant(&response.text));
        messages.push(ChatMessage::user(format!(
            "The rubric was rejected by validation: {}. Reply again with only the corrected \
             JSON array of criteria in a ```json code fence.",
            issues.join("; ")
        )));
        last_issues = issues;
    }
    Err(StageError::Generation {
        query_id: query.id.clone(),
        source_label: source.to_string(),
        attempts: total_attempts,
        detail: last_issues.join("; "),
    })
}

/// Drafts one candidate rubric for `query` using `reference` as the model
/// answer.
///
/// A positive-only profile uses the reward-criteria prompt, a penalty-only
/// profile the pitfall prompt; a mixed profile runs both and concatenates
/// (rewards first). Each prompt gets `1 + max_repair_attempts` tries, where
/// repairs feed the rejected reply and its validation issues back to the
/// model.
pub async fn generate_candidate(
    ctx: &PipelineContext,
    query: &QueryRecord,
    reference: &Reference,
    generator: &ModelRef,
) -> Result<CandidateRubric, StageError> {
    let source = format!("{}:{}", generator.label(), reference.model_id);
    let criteria = match ctx.config.profile.polarity {
        Polarity::PositiveOnly => {
            generate_with_template(
                ctx,
                query,
                reference,
                generator,
                &source,
                TemplateName::GenPositive,
                Polarity::PositiveOnly,
                ValidationMode::FullRubric,
                "positive",
            )
            .await?
        }
        Polarity::PenaltyOnly => {
            generate_with_template(
                ctx,
                query,
                reference,
                generator,
                &source,
                TemplateName::GenPenalty,
                Polarity::PenaltyOnly,
                ValidationMode::FullRubric,
                "penalty",
            )
            .await?
        }
        Polarity::Mixed => {
            let mut combined = generate_with_template(
                ctx,
                query,
                reference,
                generator,
                &source,
                TemplateName::GenPositive,
                Polarity::PositiveOnly,
                ValidationMode::PerCriterion,
                "positive",
            )
            .await?;
            let penalties = generate_with_template(
                ctx,
                query,
                reference,
                generator,
                &source,
                TemplateName::GenPenalty,
                Polarity::PenaltyOnly,
                ValidationMode::PerCriterion,
                "penalty",
            )
            .await?;
            combined.extend(penalties);
            // Both halves carry parser-provisional ids (c1..cN); re-sequence
            // across the combined list so duplicate-id checks see one rubric.
            for (index, criterion) in combined.iter_mut().enumerate() {
                criterion.id = format!("c{}", index + 1);
            }
            let rubric = Rubric::new(&query.id, RubricStage::Candidate, combined.clone());
            let report = validate_rubric(&rubric, &ctx.config.profile);
            if !report.is_ok() {
                return Err(StageError::Generation {
                    query_id: query.id.clone(),
                    source_label: source,
                    attempts: 1,
                    detail: report.error_lines().join("; "),
                });
            }
            combined
        }
    };

    let mut rubric = Rubric::new(&query.id, RubricStage::Candidate, criteria);
    for criterion in &mut rubric.criteria {
        criterion.provenance = Provenance::Candidate {
            source_model: generator.model.clone(),
        };
    }
    rubric.assign_stable_ids(&format!("candidate:{source}"));
    Ok(CandidateRubric { source, rubric })
}
