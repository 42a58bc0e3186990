//! Stage 3: raise rubric difficulty. The two strongest reference responses
//! (as scored by the base rubric itself) are contrasted by the evolver
//! model, which proposes criteria that separate them; the additions merge
//! into the final rubric.

use std::collections::BTreeMap;

use rubricforge_core::{
    merge_rubrics, parse_rubric_json, validate_criterion, validate_rubric, Provenance,
    QueryRecord, Rubric, RubricStage,
};
use rubricforge_gateway::{bindings, builtin, ChatMessage, LlmRequest, TemplateName};
use rubricforge_grader::Conversation;

use crate::context::PipelineContext;
use crate::stage::{resolve_kinds, rubric_prompt_json, StageError};

/// The two reference responses chosen for contrast, plus the audit trail of
/// how every reference scored.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferencePair {
    /// Best-scoring reference response.
    pub response_a: String,
    pub model_a: String,
    /// Runner-up.
    pub response_b: String,
    pub model_b: String,
    /// Normalized base-rubric score per reference model.
    pub selection_scores: BTreeMap<String, f64>,
}

/// Scores every reference response against the base rubric and picks the top
/// two (score descending, model id ascending on ties). Returns `None` when
/// the query has fewer than two references — evolution then has nothing to
/// contrast.
pub async fn select_reference_pair(
    ctx: &PipelineContext,
    query: &QueryRecord,
    base: &Rubric,
) -> Result<Option<ReferencePair>, StageError> {
    if query.references.len() < 2 {
        return Ok(None);
    }
    let mut scored = Vec::with_capacity(query.references.len());
    for reference in &query.references {
        let conversation = Conversation::from_prompt_response(&query.prompt, &reference.response);
        let report = ctx.grader.grade_response(base, &conversation).await?;
        scored.push((reference, report.normalized));
    }
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1)
            .then_with(|| a.0.model_id.cmp(&b.0.model_id))
    });
    let selection_scores = scored
        .iter()
        .map(|(reference, score)| (reference.model_id.clone(), *score))
        .collect();
    Ok(Some(ReferencePair {
        response_a: scored[0].0.response.clone(),
        model_a: scored[0].0.model_id.clone(),
        response_b: scored[1].0.response.clone(),
        model_b: scored[1].0.model_id.clone(),
        selection_scores,
    }))
}

/// Evolves the base rubric into the final one.
///
/// With a reference pair, the evolver model proposes additional criteria
/// from the contrast between the two responses; an empty proposal is valid —
/// some queries have no headroom. Additions are validated individually
/// (whole-rubric bounds don't apply to a delta), tagged as evolved, and
/// unioned onto the base: base criteria come through verbatim, additions are
/// appended. Without a pair the base is promoted unchanged.
pub async fn evolve(
    ctx: &PipelineContext,
    query: &QueryRecord,
    base: &Rubric,
    pair: Option<&ReferencePair>,
) -> Result<Rubric, StageError> {
    let fail = |detail: String| StageError::Evolution {
        query_id: query.id.clone(),
        detail,
    };

    let additions = match pair {
        None => Vec::new(),
        Some(pair) => {
            let prompt = builtin(TemplateName::Evolve).render_strict(&bindings([
                ("prompt", query.prompt.as_str()),
                ("response1", pair.response_a.as_str()),
                ("response2", pair.response_b.as_str()),
                ("rubrics", rubric_prompt_json(&base.criteria).as_str()),
            ]))?;
            let request = LlmRequest::new(
                &ctx.config.evolver.model,
                vec![ChatMessage::user(prompt)],
            )
            .with_max_tokens(ctx.config.gen_max_tokens)
            .with_seed_tag(format!("evolve:{}", query.id));
            let response = ctx
                .gateway
                .complete(&ctx.config.evolver.backend_id, &request)
                .await?;
            let parsed = parse_rubric_json(&response.text).map_err(|e| fail(e.to_string()))?;
            let resolved =
                resolve_kinds(parsed, ctx.grader.registry(), ctx.config.profile.strictness)
                    .map_err(|issues| fail(issues.join("; ")))?;
            let issues: Vec<String> = resolved
                .iter()
                .flat_map(|criterion| {
                    validate_criterion(criterion, &ctx.config.profile).error_lines()
                })
                .collect();
            if !issues.is_empty() {
                return Err(fail(issues.join("; ")));
            }
            resolved
        }
    };

    let mut add = Rubric::new(&query.id, RubricStage::Final, additions);
    for criterion in &mut add.criteria {
        criterion.provenance = Provenance::Evolved;
    }
    add.assign_stable_ids("evolved");

    let final_rubric = merge_rubrics(base, &add)?;
    let report = validate_rubric(&final_rubric, &ctx.config.profile);
    if !report.is_ok() {
        return Err(fail(report.error_lines().join("; ")));
    }
    Ok(final_rubric)
}
