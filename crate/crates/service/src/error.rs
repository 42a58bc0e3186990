//! HTTP error mapping: every failure leaves as `{"error": code, "detail"}`
//! with a status that reflects whose fault it was.

use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;

use rubricforge_client::wire::ApiError;
use rubricforge_grader::{GradeError, ScoreError};
use rubricforge_posttrain::RewardError;

#[derive(Debug)]
pub struct ServiceError {
    pub status: StatusCode,
    pub code: String,
    pub detail: String,
}

/// Splits the `CODE: detail` convention domain errors use for display.
/// Falls back to the given code when the message has no such prefix.
fn split_code(display: String, fallback: &str) -> (String, String) {
    if let Some((head, rest)) = display.split_once(':') {
        let is_code = !head.is_empty()
            && head
                .chars()
                .all(|c| c.is_ascii_uppercase() || c.is_ascii_digit() || c == '_');
        if is_code {
            return (head.to_string(), rest.trim_start().to_string());
        }
    }
    (fallback.to_string(), display)
}

impl ServiceError {
    pub fn new(status: StatusCode, error: impl std::fmt::Display, fallback_code: &str) -> Self {
        let (code, detail) = split_code(error.to_string(), fallback_code);
        ServiceError {
            status,
            code,
            detail,
        }
    }

    /// The caller sent something unusable.
    pub fn bad_request(error: impl std::fmt::Display) -> Self {
        ServiceError::new(StatusCode::BAD_REQUEST, error, "BAD_REQUEST")
    }
}

impl From<RewardError> for ServiceError {
    fn from(err: RewardError) -> Self {
        match err {
            RewardError::BadRequest { .. } => ServiceError::bad_request(err),
            RewardError::UnknownQuery { .. } => {
                ServiceError::new(StatusCode::NOT_FOUND, err, "UNKNOWN_QUERY")
            }
            RewardError::Grade(grade) => grade.into(),
        }
    }
}

impl From<GradeError> for ServiceError {
    fn from(err: GradeError) -> Self {
        match &err {
            // The caller controls the conversation and rubric shapes.
            GradeError::ConversationShape { .. } => ServiceError::bad_request(err),
            GradeError::Score(ScoreError::NoPositiveWeight { .. }) => {
                ServiceError::bad_request(err)
            }
            // Anything else is the judge model or our plumbing failing.
            _ => ServiceError::new(StatusCode::BAD_GATEWAY, err, "GRADE_FAILED"),
        }
    }
}

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        if self.status.is_server_error() {
            tracing::error!(code = %self.code, detail = %self.detail, "request failed");
        }
        let body = ApiError {
            error: self.code,
            detail: self.detail,
        };
        (self.status, Json(body)).into_response()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coded_messages_split_into_code_and_detail() {
        let err = ServiceError::bad_request("EMPTY_INPUT: agreement needs at least one pair");
        assert_eq!(err.code, "EMPTY_INPUT");
        assert_eq!(err.detail, "agreement needs at least one pair");
    }

    #[test]
    fn uncoded_messages_keep_the_fallback_code() {
        let err = ServiceError::bad_request("something else: went wrong");
        assert_eq!(err.code, "BAD_REQUEST");
        assert_eq!(err.detail, "something else: went wrong");
    }

    #[test]
    fn unknown_query_maps_to_404() {
        let err: ServiceError = RewardError::UnknownQuery {
            query_id: "q9".to_string(),
        }
        .into();
        assert_eq!(err.status, StatusCode::NOT_FOUND);
        assert_eq!(err.code, "UNKNOWN_QUERY");
    }
}
