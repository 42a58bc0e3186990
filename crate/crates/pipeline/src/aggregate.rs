//! Stage 2: merge the candidate rubrics into one base rubric by folding
//! pairwise through the aggregator model.

use rubricforge_core::{
    parse_rubric_json, validate_rubric, Criterion, Provenance, QueryRecord, Rubric, RubricStage,
};
use rubricforge_gateway::{bindings, builtin, ChatMessage, LlmRequest, TemplateName};

use crate::candidate::CandidateRubric;
use crate::context::PipelineContext;
use crate::stage::{resolve_kinds, rubric_prompt_json, StageError};

/// Folds candidates into the base rubric.
///
/// Candidates are sorted by their source label so the fold order — and with
/// it every prompt, cache key, and result — is independent of generation
/// completion order. The fold runs left to right: the accumulator is merged
/// with the next candidate one aggregator call at a time.
pub async fn aggregate(
    ctx: &PipelineContext,
    query: &QueryRecord,
    candidates: &[CandidateRubric],
) -> Result<Rubric, StageError> {
    if candidates.len() < 2 {
        return Err(StageError::NotEnoughCandidates {
            query_id: query.id.clone(),
            have: candidates.len(),
        });
    }
    let mut ordered: Vec<&CandidateRubric> = candidates.iter().collect();
    ordered.sort_by(|a, b| a.source.cmp(&b.source));

    let fail = |detail: String| StageError::Aggregation {
        query_id: query.id.clone(),
        detail,
    };

    let template = builtin(TemplateName::Aggregate);
    let mut acc: Vec<Criterion> = ordered[0].rubric.criteria.clone();
    for (step, next) in ordered[1..].iter().enumerate() {
        let prompt = template.render_strict(&bindings([
            ("prompt", query.prompt.as_str()),
            ("rubrics1", rubric_prompt_json(&acc).as_str()),
            ("rubrics2", rubric_prompt_json(&next.rubric.criteria).as_str()),
        ]))?;
        let request = LlmRequest::new(
            &ctx.config.aggregator.model,
            vec![ChatMessage::user(prompt)],
        )
        .with_max_tokens(ctx.config.gen_max_tokens)
        .with_seed_tag(format!("agg:{}:fold{}", query.id, step + 1));
        let response = ctx
            .gateway
            .complete(&ctx.config.aggregator.backend_id, &request)
            .await?;
        let merged = parse_rubric_json(&response.text).map_err(|e| fail(e.to_string()))?;
        acc = resolve_kinds(merged, ctx.grader.registry(), ctx.config.profile.strictness)
            .map_err(|issues| fail(issues.join("; ")))?;
    }

    let mut base = Rubric::new(&query.id, RubricStage::Base, acc);
    for criterion in &mut base.criteria {
        criterion.provenance = Provenance::Base;
    }
    base.assign_stable_ids("base");
    let report = validate_rubric(&base, &ctx.config.profile);
    if !report.is_ok() {
        return Err(fail(report.error_lines().join("; ")));
    }
    Ok(base)
}
