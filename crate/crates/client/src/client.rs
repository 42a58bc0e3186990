//! A thin typed client over the service's HTTP surface.

use serde::de::DeserializeOwned;
use serde::Serialize;
use thiserror::Error;

use rubricforge_analysis::{AgreementReport, ScoreDensity};
use rubricforge_grader::ScoreReport;
use rubricforge_posttrain::{RewardRequest, RewardResponse};

use crate::wire::{
    AgreementRequest, ApiError, BestOfNRequest, BestOfNResponse, DensityRequest, GradeRequest,
    Health, ParseRequest, ParseResponse, SelectRequest, SelectResponse, ValidateRequest,
    ValidateResponse,
};

#[derive(Debug, Error)]
pub enum ClientError {
    /// The request never produced an HTTP response (connect, timeout, body
    /// decode).
    #[error("TRANSPORT: {0}")]
    Transport(#[from] reqwest::Error),
    /// The service answered with a non-success status and an error body.
    #[error("API_ERROR: status {status}: {code}: {detail}")]
    Api {
        status: u16,
        code: String,
        detail: String,
    },
}

/// Typed access to one running service instance.
#[derive(Debug, Clone)]
pub struct ApiClient {
    base_url: String,
    http: reqwest::Client,
}

impl ApiClient {
    /// `base_url` is scheme + authority, e.g. `http://127.0.0.1:8080`;
    /// trailing slashes are tolerated.
    pub fn new(base_url: impl Into<String>) -> Self {
        let mut base_url = base_url.into();
        while base_url.ends_with('/') {
            base_url.pop();
        }
        ApiClient {
            base_url,
            http: reqwest::Client::new(),
        }
    }

    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    async fn decode<T: DeserializeOwned>(
        response: reqwest::Response,
    ) -> Result<T, ClientError> {
        let status = response.status();
        if status.is_success() {
            return Ok(response.json::<T>().await?);
        }
        let body = response.text().await.unwrap_or_default();
        let (code, detail) = match serde_json::from_str::<ApiError>(&body) {
            Ok(err) => (err.error, err.detail),
            Err(_) => ("UNRECOGNIZED_ERROR_BODY".to_string(), body),
        };
        Err(ClientError::Api {
            status: status.as_u16(),
            code,
            detail,
        })
    }

    async fn post<Req: Serialize, Resp: DeserializeOwned>(
        &self,
        path: &str,
        body: &Req,
    ) -> Result<Resp, ClientError> {
        let response = self
            .http
            .post(format!("{}{path}", self.base_url))
            .json(body)
            .send()
            .await?;
        Self::decode(response).await
    }

    pub async fn health(&self) -> Result<Health, ClientError> {
        let response = self
            .http
            .get(format!("{}/healthz", self.base_url))
            .send()
            .await?;
        Self::decode(response).await
    }

    /// Scores a rollout against a stored or inline rubric.
    pub async fn reward(&self, request: &RewardRequest) -> Result<RewardResponse, ClientError> {
        self.post("/v1/reward", request).await
    }

    /// Grades a conversation against an inline rubric and returns the full
    /// per-criterion report.
    pub async fn grade(&self, request: &GradeRequest) -> Result<ScoreReport, ClientError> {
        self.post("/v1/grade", request).await
    }

    pub async fn validate_rubric(
        &self,
        request: &ValidateRequest,
    ) -> Result<ValidateResponse, ClientError> {
        self.post("/v1/rubrics/validate", request).await
    }

    /// Extracts criteria from raw model text.
    pub async fn parse_rubric(&self, request: &ParseRequest) -> Result<ParseResponse, ClientError> {
        self.post("/v1/rubrics/parse", request).await
    }

    /// Runs threshold rejection sampling over candidate scores.
    pub async fn select_candidate(
        &self,
        request: &SelectRequest,
    ) -> Result<SelectResponse, ClientError> {
        self.post("/v1/curate/select", request).await
    }

    pub async fn agreement(
        &self,
        request: &AgreementRequest,
    ) -> Result<AgreementReport, ClientError> {
        self.post("/v1/analyze/agreement", request).await
    }

    pub async fn density(&self, request: &DensityRequest) -> Result<ScoreDensity, ClientError> {
        self.post("/v1/analyze/density", request).await
    }

    pub async fn best_of_n(
        &self,
        request: &BestOfNRequest,
    ) -> Result<BestOfNResponse, ClientError> {
        self.post("/v1/analyze/best-of-n", request).await
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn base_url_trailing_slashes_are_trimmed() {
        let client = ApiClient::new("http://127.0.0.1:9000///");
        assert_eq!(client.base_url(), "http://127.0.0.1:9000");
    }
}
