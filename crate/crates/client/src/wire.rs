//! Request and response bodies for the HTTP surface.
//!
//! Domain types that already have a stable JSON form (criteria, judgments,
//! score reports, reward payloads, analysis reports) ride the wire as-is;
//! this module adds only the envelopes specific to each endpoint.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use rubricforge_analysis::{BestOfNPoint, Confusion, LabelPair};
use rubricforge_core::{Criterion, RubricStage, ValidationIssue, ValidationProfile};
use rubricforge_grader::Conversation;

/// `GET /healthz` response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Health {
    pub status: String,
    /// Queries with a stored rubric, available to `/v1/reward` by id.
    pub queries: usize,
}

/// `POST /v1/grade` request; the response is a
/// [`rubricforge_grader::ScoreReport`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradeRequest {
    /// Label carried through to the score report.
    pub query_id: String,
    pub conversation: Conversation,
    pub rubric: Vec<Criterion>,
}

/// `POST /v1/rubrics/validate` request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidateRequest {
    pub query_id: String,
    pub rubric: Vec<Criterion>,
    #[serde(default)]
    pub profile: ValidationProfile,
    /// Stage whose rules apply; criterion-count bounds bind candidate and
    /// base rubrics but not final ones.
    #[serde(default = "default_stage")]
    pub stage: RubricStage,
}

fn default_stage() -> RubricStage {
    RubricStage::Base
}

/// `POST /v1/rubrics/validate` response.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateResponse {
    pub ok: bool,
    pub errors: Vec<ValidationIssue>,
    pub warnings: Vec<ValidationIssue>,
}

/// `POST /v1/rubrics/parse` request: raw model text in, criteria out.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseRequest {
    pub text: String,
    /// Keep criteria whose checker-shaped description is unregistered as
    /// semantic instead of failing.
    #[serde(default)]
    pub lenient: bool,
}

/// `POST /v1/rubrics/parse` response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParseResponse {
    pub criteria: Vec<Criterion>,
}

/// `POST /v1/curate/select` request: candidate scores in, the rejection
/// sampler's pick out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectRequest {
    pub scores: BTreeMap<u32, f64>,
    /// Minimum score a candidate must exceed; defaults to the standard
    /// curation threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// `POST /v1/curate/select` response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectResponse {
    pub selected: Option<u32>,
    pub threshold: f64,
}

/// `POST /v1/analyze/agreement` request: either raw label pairs or
/// pre-tallied confusion counts, exactly one of the two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pairs: Option<Vec<LabelPair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<Confusion>,
}

/// `POST /v1/analyze/density` request; the response is a
/// [`rubricforge_analysis::ScoreDensity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRequest {
    pub scores: Vec<f64>,
    #[serde(default = "default_bins")]
    pub bins: usize,
}

fn default_bins() -> usize {
    10
}

/// `POST /v1/analyze/best-of-n` request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestOfNRequest {
    /// Per-query candidate scores in candidate order.
    pub scores_by_query: BTreeMap<String, Vec<f64>>,
    pub max_n: usize,
}

/// `POST /v1/analyze/best-of-n` response.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestOfNResponse {
    pub curve: Vec<BestOfNPoint>,
}

/// Error body every non-2xx response carries.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApiError {
    /// Stable machine-readable code, e.g. `UNKNOWN_QUERY`.
    pub error: String,
    pub detail: String,
}
