//! Endpoint handlers and the router.

use std::sync::Arc;

use axum::extract::State;
use axum::routing::{get, post};
use axum::{Json, Router};

use rubricforge_analysis::{
    agreement_from_pairs, agreement_report, best_of_n_curve, score_density, AgreementReport,
    ScoreDensity,
};
use rubricforge_client::wire::{
    AgreementRequest, BestOfNRequest, BestOfNResponse, DensityRequest, GradeRequest, Health,
    ParseRequest, ParseResponse, SelectRequest, SelectResponse, ValidateRequest, ValidateResponse,
};
use rubricforge_core::{
    classify_criterion_kind, parse_rubric_json, validate_rubric, Criterion, Rubric, RubricStage,
};
use rubricforge_grader::ScoreReport;
use rubricforge_posttrain::{
    compute_reward, select_best, RewardRequest, RewardResponse, DEFAULT_THRESHOLD,
};

use crate::error::ServiceError;
use crate::state::ServiceState;

pub fn router(state: Arc<ServiceState>) -> Router {
    Router::new()
        .route("/healthz", get(health))
        .route("/v1/reward", post(reward))
        .route("/v1/grade", post(grade))
        .route("/v1/rubrics/validate", post(validate))
        .route("/v1/rubrics/parse", post(parse))
        .route("/v1/curate/select", post(select))
        .route("/v1/analyze/agreement", post(agreement))
        .route("/v1/analyze/density", post(density))
        .route("/v1/analyze/best-of-n", post(best_of_n))
        .with_state(state)
}

async fn health(State(state): State<Arc<ServiceState>>) -> Json<Health> {
    Json(Health {
        status: "ok".to_string(),
        queries: state.store.len(),
    })
}

async fn reward(
    State(state): State<Arc<ServiceState>>,
    Json(request): Json<RewardRequest>,
) -> Result<Json<RewardResponse>, ServiceError> {
    let response =
        compute_reward(&state.grader, &state.store, &state.shaping, &request).await?;
    Ok(Json(response))
}

/// Resolves checker-shaped descriptions in an inline rubric; unknown shapes
/// are the caller's mistake.
fn classify_inline(
    criteria: Vec<Criterion>,
    state: &ServiceState,
) -> Result<Vec<Criterion>, ServiceError> {
    criteria
        .into_iter()
        .map(|criterion| {
            classify_criterion_kind(&criterion, state.grader.registry())
                .map_err(ServiceError::bad_request)
        })
        .collect()
}

async fn grade(
    State(state): State<Arc<ServiceState>>,
    Json(request): Json<GradeRequest>,
) -> Result<Json<ScoreReport>, ServiceError> {
    let criteria = classify_inline(request.rubric, &state)?;
    let rubric = Rubric::new(&request.query_id, RubricStage::Final, criteria);
    let report = state
        .grader
        .grade_response(&rubric, &request.conversation)
        .await?;
    Ok(Json(report))
}

async fn validate(
    State(_state): State<Arc<ServiceState>>,
    Json(request): Json<ValidateRequest>,
) -> Json<ValidateResponse> {
    let rubric = Rubric::new(&request.query_id, request.stage, request.rubric);
    let report = validate_rubric(&rubric, &request.profile);
    Json(ValidateResponse {
        ok: report.is_ok(),
        errors: report.errors,
        warnings: report.warnings,
    })
}

async fn parse(
    State(state): State<Arc<ServiceState>>,
    Json(request): Json<ParseRequest>,
) -> Result<Json<ParseResponse>, ServiceError> {
    let criteria = parse_rubric_json(&request.text).map_err(ServiceError::bad_request)?;
    let criteria = if request.lenient {
        criteria
            .into_iter()
            .map(|criterion| {
                classify_criterion_kind(&criterion, state.grader.registry()).unwrap_or_else(
                    |err| {
                        tracing::warn!(
                            criterion_id = %criterion.id,
                            error = %err,
                            "criterion kept semantic: checker-shaped description is unregistered"
                        );
                        criterion
                    },
                )
            })
            .collect()
    } else {
        classify_inline(criteria, &state)?
    };
    Ok(Json(ParseResponse { criteria }))
}

async fn select(
    State(_state): State<Arc<ServiceState>>,
    Json(request): Json<SelectRequest>,
) -> Result<Json<SelectResponse>, ServiceError> {
    let threshold = request.threshold.unwrap_or(DEFAULT_THRESHOLD);
    if !threshold.is_finite() {
        return Err(ServiceError::bad_request(format!(
            "BAD_REQUEST: threshold must be finite, got {threshold}"
        )));
    }
    let selected = select_best(&request.scores, threshold);
    Ok(Json(SelectResponse {
        selected,
        threshold,
    }))
}

async fn agreement(
    State(_state): State<Arc<ServiceState>>,
    Json(request): Json<AgreementRequest>,
) -> Result<Json<AgreementReport>, ServiceError> {
    let report = match (request.pairs, request.confusion) {
        (Some(pairs), None) => {
            agreement_from_pairs(&pairs).map_err(ServiceError::bad_request)?
        }
        (None, Some(confusion)) => {
            agreement_report(confusion).map_err(ServiceError::bad_request)?
        }
        _ => {
            return Err(ServiceError::bad_request(
                "BAD_REQUEST: pass either pairs or confusion, exactly one",
            ));
        }
    };
    Ok(Json(report))
}

async fn density(
    State(_state): State<Arc<ServiceState>>,
    Json(request): Json<DensityRequest>,
) -> Result<Json<ScoreDensity>, ServiceError> {
    let density =
        score_density(&request.scores, request.bins).map_err(ServiceError::bad_request)?;
    Ok(Json(density))
}

async fn best_of_n(
    State(_state): State<Arc<ServiceState>>,
    Json(request): Json<BestOfNRequest>,
) -> Result<Json<BestOfNResponse>, ServiceError> {
    let curve = best_of_n_curve(&request.scores_by_query, request.max_n)
        .map_err(ServiceError::bad_request)?;
    Ok(Json(BestOfNResponse { curve }))
}
