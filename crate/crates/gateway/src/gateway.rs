//! The gateway: named backends behind one `complete` call that layers
//! caching, pacing, bounded concurrency, and retry with exponential backoff.

use std::collections::HashMap;
use std::sync::{Arc, Mutex as StdMutex};
use std::time::Duration;

use thiserror::Error;

use crate::backend::{BackendError, BackendErrorKind, LlmBackend};
use crate::cache::ResponseCache;
use crate::limit::RateLimiter;
use crate::request::{LlmRequest, LlmResponse};

/// Per-backend operating limits.
#[derive(Debug, Clone)]
pub struct BackendOptions {
    /// Paced call rate; `None` means unpaced.
    pub rate_limit_per_minute: Option<u32>,
    /// Maximum concurrent upstream calls.
    pub max_in_flight: usize,
    /// Retries after the first attempt, for retryable failures only.
    pub max_retries: u32,
    /// First backoff delay; doubles per attempt.
    pub retry_base: Duration,
}

impl Default for BackendOptions {
    fn default() -> Self {
        BackendOptions {
            rate_limit_per_minute: None,
            max_in_flight: 8,
            max_retries: 2,
            retry_base: Duration::from_millis(200),
        }
    }
}

#[derive(Debug, Error)]
pub enum GatewayError {
    #[error("UNKNOWN_BACKEND: no backend registered as `{backend_id}`")]
    UnknownBackend { backend_id: String },
    #[error("backend `{backend_id}` failed after {attempts} attempt(s){}: {message}", status.map(|s| format!(" (status {s})")).unwrap_or_default())]
    Backend {
        backend_id: String,
        status: Option<u16>,
        attempts: u32,
        message: String,
    },
    #[error("backend `{backend_id}` timed out after {attempts} attempt(s)")]
    Timeout { backend_id: String, attempts: u32 },
    #[error("{message}")]
    ScriptExhausted { message: String },
}

impl GatewayError {
    fn from_backend(error: BackendError, attempts: u32) -> Self {
        match error.kind {
            BackendErrorKind::Timeout => GatewayError::Timeout {
                backend_id: error.backend_id,
                attempts,
            },
            BackendErrorKind::ScriptExhausted => GatewayError::ScriptExhausted {
                message: error.message,
            },
            _ => GatewayError::Backend {
                backend_id: error.backend_id,
                status: error.status,
                attempts,
                message: error.message,
            },
        }
    }
}

struct BackendEntry {
    backend: Arc<dyn LlmBackend>,
    limiter: Option<RateLimiter>,
    in_flight: Arc<tokio::sync::Semaphore>,
    options: BackendOptions,
}

/// Registry of backends plus the shared response cache.
pub struct Gateway {
    backends: HashMap<String, BackendEntry>,
    cache: Option<ResponseCache>,
    /// Per-fingerprint locks making cache get-or-insert atomic: concurrent
    /// identical requests produce one upstream call, not several.
    key_locks: StdMutex<HashMap<String, Arc<tokio::sync::Mutex<()>>>>,
}

impl Gateway {
    /// A gateway without a disk cache.
    pub fn new() -> Self {
        Gateway {
            backends: HashMap::new(),
            cache: None,
            key_locks: StdMutex::new(HashMap::new()),
        }
    }

    /// A gateway caching responses under `dir`.
    pub fn with_cache_dir(dir: impl Into<std::path::PathBuf>) -> std::io::Result<Self> {
        let mut gateway = Gateway::new();
        gateway.cache = Some(ResponseCache::open(dir)?);
        Ok(gateway)
    }

    /// Registers `backend` under its own id, replacing any previous
    /// registration of that id.
    pub fn register(&mut self, backend: Arc<dyn LlmBackend>, options: BackendOptions) {
        let limiter = options.rate_limit_per_minute.map(RateLimiter::per_minute);
        let in_flight = Arc::new(tokio::sync::Semaphore::new(options.max_in_flight.max(1)));
        self.backends.insert(
            backend.id().to_string(),
            BackendEntry {
                backend,
                limiter,
                in_flight,
                options,
            },
        );
    }

    pub fn has_backend(&self, backend_id: &str) -> bool {
        self.backends.contains_key(backend_id)
    }

    pub fn backend_ids(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.backends.keys().cloned().collect();
        ids.sort();
        ids
    }

    fn key_lock(&self, fingerprint: &str) -> Arc<tokio::sync::Mutex<()>> {
        let mut locks = self.key_locks.lock().expect("key lock table");
        locks
            .entry(fingerprint.to_string())
            .or_insert_with(|| Arc::new(tokio::sync::Mutex::new(())))
            .clone()
    }

    fn release_key_lock(&self, fingerprint: &str) {
        let mut locks = self.key_locks.lock().expect("key lock table");
        if let Some(handle) = locks.get(fingerprint) {
            // Only the table and our clone hold it: nobody is waiting.
            if Arc::strong_count(handle) <= 2 {
                locks.remove(fingerprint);
            }
        }
    }

    /// Completes `request` against the named backend: cache lookup first,
    /// then a paced, concurrency-bounded call with retry on transient
    /// failures (429/5xx/timeouts/transport errors).
    pub async fn complete(
        &self,
        backend_id: &str,
        request: &LlmRequest,
    ) -> Result<LlmResponse, GatewayError> {
        let entry = self
            .backends
            .get(backend_id)
            .ok_or_else(|| GatewayError::UnknownBackend {
                backend_id: backend_id.to_string(),
            })?;

        if self.cache.is_some() {
            let fingerprint = request.fingerprint();
            let lock = self.key_lock(&fingerprint);
            let _guard = lock.lock().await;
            let cache = self.cache.as_ref().expect("checked above");
            if let Some(hit) = cache.get(&fingerprint) {
                drop(_guard);
                self.release_key_lock(&fingerprint);
                return Ok(hit);
            }
            let result = self.call_with_retry(entry, request).await;
            if let Ok(response) = &result {
                if let Err(e) = cache.put(&fingerprint, response) {
                    tracing::warn!(fingerprint, error = %e, "response cache write failed");
                }
            }
            drop(_guard);
            self.release_key_lock(&fingerprint);
            return result;
        }

        self.call_with_retry(entry, request).await
    }

    async fn call_with_retry(
        &self,
        entry: &BackendEntry,
        request: &LlmRequest,
    ) -> Result<LlmResponse, GatewayError> {
        let _permit = entry
            .in_flight
            .acquire()
            .await
            .expect("in-flight semaphore never closed");

        let max_attempts = entry.options.max_retries + 1;
        let mut attempt = 0u32;
        loop {
            if let Some(limiter) = &entry.limiter {
                limiter.acquire().await;
            }
            attempt += 1;
            match entry.backend.complete(request).await {
                Ok(raw) => {
                    return Ok(LlmResponse {
                        text: raw.text,
                        usage: raw.usage,
                        backend_id: entry.backend.id().to_string(),
                        cached: false,
                    })
                }
                Err(error) => {
                    if error.retryable && attempt < max_attempts {
                        let backoff = entry.options.retry_base * 2u32.pow(attempt - 1);
                        tracing::debug!(
                            backend_id = entry.backend.id(),
                            attempt,
                            backoff_ms = backoff.as_millis() as u64,
                            error = %error,
                            "retrying backend call"
                        );
                        tokio::time::sleep(backoff).await;
                        continue;
                    }
                    return Err(GatewayError::from_backend(error, attempt));
                }
            }
        }
    }
}

impl Default for Gateway {
    fn default() -> Self {
        Gateway::new()
    }
}
