//! Pipeline configuration: which models play which role, and the knobs that
//! govern generation, validation, and scheduling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::{Polarity, ValidationProfile};

/// A model reachable through the gateway: the backend to route to plus the
/// model name sent on the request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelRef {
    pub backend_id: String,
    pub model: String,
}

impl ModelRef {
    pub fn new(backend_id: impl Into<String>, model: impl Into<String>) -> Self {
        ModelRef {
            backend_id: backend_id.into(),
            model: model.into(),
        }
    }

    /// Stable display/sort label, `backend:model`.
    pub fn label(&self) -> String {
        format!("{}:{}", self.backend_id, self.model)
    }
}

fn default_max_repair_attempts() -> u32 {
    2
}
fn default_concurrency_limit() -> usize {
    8
}
fn default_gen_temperature() -> f64 {
    1.0
}
fn default_gen_max_tokens() -> u32 {
    4096
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    /// Models that each propose a candidate rubric per query.
    pub generator_models: Vec<ModelRef>,
    /// Model that merges candidate pairs into the base rubric.
    pub aggregator: ModelRef,
    /// Model that proposes difficulty-raising additions.
    pub evolver: ModelRef,
    /// Judge used to score reference responses against the base rubric when
    /// picking the evolution pair.
    pub grader: ModelRef,
    /// Validation profile applied to every synthesized rubric.
    #[serde(default)]
    pub profile: ValidationProfile,
    /// Extra generation attempts after a reply fails to parse or validate.
    #[serde(default = "default_max_repair_attempts")]
    pub max_repair_attempts: u32,
    /// Queries processed concurrently.
    #[serde(default = "default_concurrency_limit")]
    pub concurrency_limit: usize,
    /// When set, every generator sees every reference response (one
    /// candidate per generator x reference); otherwise each generator uses
    /// the query's first reference.
    #[serde(default)]
    pub use_all_references: bool,
    #[serde(default = "default_gen_temperature")]
    pub gen_temperature: f64,
    #[serde(default = "default_gen_max_tokens")]
    pub gen_max_tokens: u32,
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("NO_GENERATORS: at least one generator model is required")]
    NoGenerators,
    #[error(
        "SINGLE_CANDIDATE_SOURCE: aggregation needs two candidate rubrics per query; \
         configure a second generator model or set use_all_references"
    )]
    SingleCandidateSource,
    #[error(
        "PENALTY_ONLY_UNSUPPORTED: a penalty-only profile admits no positive weights, \
         so synthesized rubrics could never score reference responses; use mixed instead"
    )]
    PenaltyOnlyProfile,
    #[error("ZERO_CONCURRENCY: concurrency_limit must be at least 1")]
    ZeroConcurrency,
}

impl PipelineConfig {
    pub fn new(
        generator_models: Vec<ModelRef>,
        aggregator: ModelRef,
        evolver: ModelRef,
        grader: ModelRef,
    ) -> Self {
        PipelineConfig {
            generator_models,
            aggregator,
            evolver,
            grader,
            profile: ValidationProfile::default(),
            max_repair_attempts: default_max_repair_attempts(),
            concurrency_limit: default_concurrency_limit(),
            use_all_references: false,
            gen_temperature: default_gen_temperature(),
            gen_max_tokens: default_gen_max_tokens(),
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.generator_models.is_empty() {
            return Err(ConfigError::NoGenerators);
        }
        if self.generator_models.len() < 2 && !self.use_all_references {
            return Err(ConfigError::SingleCandidateSource);
        }
        if self.profile.polarity == Polarity::PenaltyOnly {
            return Err(ConfigError::PenaltyOnlyProfile);
        }
        if self.concurrency_limit == 0 {
            return Err(ConfigError::ZeroConcurrency);
        }
        Ok(())
    }
}
