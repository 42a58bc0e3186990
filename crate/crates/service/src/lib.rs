//! HTTP service over the grading and curation machinery.
//!
//! Endpoints:
//!
//! | Route | Purpose |
//! |---|---|
//! | `GET /healthz` | liveness + stored-query count |
//! | `POST /v1/reward` | score a rollout (stored or inline rubric), optional length shaping |
//! | `POST /v1/grade` | full per-criterion score report for a conversation |
//! | `POST /v1/rubrics/validate` | profile validation with error/warning codes |
//! | `POST /v1/rubrics/parse` | extract criteria from raw model text |
//! | `POST /v1/curate/select` | threshold rejection sampling over candidate scores |
//! | `POST /v1/analyze/agreement` | Cohen's kappa + F1 between two raters |
//! | `POST /v1/analyze/density` | score histogram with bin midpoints |
//! | `POST /v1/analyze/best-of-n` | best-of-n reward curve |
//!
//! Failures carry `{"error": CODE, "detail": text}`: 400 for unusable
//! requests, 404 for unknown query ids, 502 when the judge model fails.

pub mod error;
pub mod routes;
pub mod state;

use std::future::Future;
use std::sync::Arc;

pub use error::ServiceError;
pub use routes::router;
pub use state::ServiceState;

/// Serves the API on an already-bound listener until `shutdown` resolves;
/// in-flight requests drain before the future completes.
pub async fn serve(
    state: Arc<ServiceState>,
    listener: tokio::net::TcpListener,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(state))
        .with_graceful_shutdown(shutdown)
        .await
}
