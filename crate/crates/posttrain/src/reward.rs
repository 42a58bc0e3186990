//! Rubric-based reward computation for RL rollouts, with optional overlong
//! length shaping.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::{
    classify_criterion_kind, read_jsonl, CheckerLookup, Criterion, DatasetEntry, JsonlError,
    Rubric, RubricStage,
};
use rubricforge_grader::{Conversation, GradeError, Grader, Judgment};

/// Soft length-penalty window applied on top of the rubric reward.
///
/// Responses at or under `max_len - buffer` tokens keep their full reward;
/// the deduction ramps linearly across the buffer and tops out at `penalty`
/// for responses at or past `max_len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShapingConfig {
    pub max_len: u32,
    pub buffer: u32,
    pub penalty: f64,
}

impl Default for ShapingConfig {
    fn default() -> Self {
        ShapingConfig {
            max_len: 8192,
            buffer: 4096,
            penalty: 0.5,
        }
    }
}

/// `reward - penalty * clamp((length - (max_len - buffer)) / buffer, 0, 1)`.
///
/// With a zero buffer the ramp degenerates to a step: full penalty strictly
/// past `max_len`, none otherwise.
pub fn overlong_shaping(reward: f64, token_length: u32, config: &ShapingConfig) -> f64 {
    let length = f64::from(token_length);
    let max_len = f64::from(config.max_len);
    if config.buffer == 0 {
        return if length > max_len {
            reward - config.penalty
        } else {
            reward
        };
    }
    let start = max_len - f64::from(config.buffer);
    let overshoot = ((length - start) / f64::from(config.buffer)).clamp(0.0, 1.0);
    reward - config.penalty * overshoot
}

/// A reward query: either a stored rubric by query id, or an inline
/// prompt+rubric pair. Exactly one of the two forms must be supplied.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardRequest {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub query_id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prompt: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rubric: Option<Vec<Criterion>>,
    pub response: String,
    /// Rollout length in tokens; enables overlong shaping when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub token_length: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardResponse {
    /// Weight-normalized rubric reward in `[0, 1]`.
    pub reward: f64,
    /// Reward after overlong shaping; present iff the request carried a
    /// token length. May go below zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shaped_reward: Option<f64>,
    pub judgments: Vec<Judgment>,
}

#[derive(Debug, Error)]
pub enum RewardError {
    #[error("BAD_REQUEST: {detail}")]
    BadRequest { detail: String },
    #[error("UNKNOWN_QUERY: no stored rubric for `{query_id}`")]
    UnknownQuery { query_id: String },
    #[error(transparent)]
    Grade(#[from] GradeError),
}

#[derive(Debug, Error)]
pub enum StoreError {
    #[error(transparent)]
    Jsonl(#[from] JsonlError),
    #[error("DUPLICATE_QUERY: dataset repeats query id `{query_id}`")]
    DuplicateQuery { query_id: String },
    #[error("UNKNOWN_CHECKER: query `{query_id}` criterion `{criterion_id}`: {detail}")]
    UnknownChecker {
        query_id: String,
        criterion_id: String,
        detail: String,
    },
}

/// A prompt+rubric pair held by the store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreEntry {
    pub prompt: String,
    pub rubric: Rubric,
}

/// In-memory rubric lookup for reward serving, loaded from a dataset.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RubricStore {
    entries: BTreeMap<String, StoreEntry>,
}

impl RubricStore {
    pub fn new() -> Self {
        RubricStore::default()
    }

    /// Builds a store from dataset entries, resolving criterion kinds
    /// against the given checker registry: a criterion whose description is
    /// exactly a registered checker id becomes verifiable.
    ///
    /// When `lenient` is set, descriptions shaped like checker ids that are
    /// not registered stay semantic (with a warning) instead of failing the
    /// load.
    pub fn from_entries<L: CheckerLookup>(
        entries: Vec<DatasetEntry>,
        registry: &L,
        lenient: bool,
    ) -> Result<Self, StoreError> {
        let mut store = RubricStore::new();
        for entry in entries {
            if store.entries.contains_key(&entry.id) {
                return Err(StoreError::DuplicateQuery { query_id: entry.id });
            }
            let mut criteria = Vec::with_capacity(entry.rubric.len());
            for criterion in entry.rubric {
                match classify_criterion_kind(&criterion, registry) {
                    Ok(resolved) => criteria.push(resolved),
                    Err(err) if lenient => {
                        tracing::warn!(
                            query_id = %entry.id,
                            criterion_id = %criterion.id,
                            error = %err,
                            "criterion kept semantic: checker-shaped description is unregistered"
                        );
                        criteria.push(criterion);
                    }
                    Err(err) => {
                        return Err(StoreError::UnknownChecker {
                            query_id: entry.id,
                            criterion_id: criterion.id,
                            detail: err.to_string(),
                        });
                    }
                }
            }
            store.entries.insert(
                entry.id.clone(),
                StoreEntry {
                    prompt: entry.prompt,
                    rubric: Rubric {
                        query_id: entry.id,
                        stage: RubricStage::Final,
                        criteria,
                    },
                },
            );
        }
        Ok(store)
    }

    /// Loads a dataset JSONL file (one entry per line).
    pub fn load_jsonl<L: CheckerLookup>(
        path: &Path,
        registry: &L,
        lenient: bool,
    ) -> Result<Self, StoreError> {
        let entries: Vec<DatasetEntry> = read_jsonl(path)?;
        RubricStore::from_entries(entries, registry, lenient)
    }

    pub fn get(&self, query_id: &str) -> Option<&StoreEntry> {
        self.entries.get(query_id)
    }

    pub fn insert(&mut self, query_id: impl Into<String>, entry: StoreEntry) {
        self.entries.insert(query_id.into(), entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Rubrics keyed by query id, as curation expects them.
    pub fn rubric_map(&self) -> BTreeMap<String, Rubric> {
        self.entries
            .iter()
            .map(|(id, entry)| (id.clone(), entry.rubric.clone()))
            .collect()
    }
}

/// Grades one rollout and returns its reward, shaped when the request
/// carries a token length.
pub async fn compute_reward(
    grader: &Grader,
    store: &RubricStore,
    shaping: &ShapingConfig,
    request: &RewardRequest,
) -> Result<RewardResponse, RewardError> {
    let (prompt, owned_rubric);
    let rubric: &Rubric = match (&request.query_id, &request.prompt, &request.rubric) {
        (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
            return Err(RewardError::BadRequest {
                detail: "pass either query_id or an inline prompt+rubric, not both".to_string(),
            });
        }
        (Some(query_id), None, None) => {
            let entry = store.get(query_id).ok_or_else(|| RewardError::UnknownQuery {
                query_id: query_id.clone(),
            })?;
            prompt = entry.prompt.clone();
            &entry.rubric
        }
        (None, Some(inline_prompt), Some(criteria)) => {
            let mut resolved = Vec::with_capacity(criteria.len());
            for criterion in criteria {
                let criterion = classify_criterion_kind(criterion, grader.registry())
                    .map_err(|err| RewardError::BadRequest {
                        detail: err.to_string(),
                    })?;
                resolved.push(criterion);
            }
            prompt = inline_prompt.clone();
            owned_rubric = Rubric {
                query_id: "inline".to_string(),
                stage: RubricStage::Final,
                criteria: resolved,
            };
            &owned_rubric
        }
        _ => {
            return Err(RewardError::BadRequest {
                detail: "pass query_id, or both prompt and rubric".to_string(),
            });
        }
    };

    let conversation = Conversation::from_prompt_response(&prompt, &request.response);
    let report = grader.grade_response(rubric, &conversation).await?;
    let shaped_reward = request
        .token_length
        .map(|length| overlong_shaping(report.normalized, length, shaping));
    Ok(RewardResponse {
        reward: report.normalized,
        shaped_reward,
        judgments: report.judgments,
    })
}
