//! Candidate response pools and best-of-pool selection.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::Rubric;
use rubricforge_grader::{Conversation, FailurePolicy, GradeError, Grader};

/// One sampled response for a query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoolCandidate {
    pub candidate_id: u32,
    pub response: String,
}

/// All sampled responses for one query, in sampling order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidatePool {
    pub query_id: String,
    pub prompt: String,
    pub candidates: Vec<PoolCandidate>,
}

#[derive(Debug, Error)]
pub enum PoolError {
    #[error("EMPTY_POOL: query `{query_id}` has no candidates")]
    Empty { query_id: String },
    #[error("DUPLICATE_CANDIDATE: query `{query_id}` repeats candidate id {candidate_id}")]
    DuplicateCandidate { query_id: String, candidate_id: u32 },
}

impl CandidatePool {
    pub fn validate(&self) -> Result<(), PoolError> {
        if self.candidates.is_empty() {
            return Err(PoolError::Empty {
                query_id: self.query_id.clone(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for candidate in &self.candidates {
            if !seen.insert(candidate.candidate_id) {
                return Err(PoolError::DuplicateCandidate {
                    query_id: self.query_id.clone(),
                    candidate_id: candidate.candidate_id,
                });
            }
        }
        Ok(())
    }
}

/// Grades every candidate in a pool; returns normalized scores keyed by
/// candidate id.
///
/// Under [`FailurePolicy::ZeroAndFlag`] a candidate whose grading fails
/// outright scores 0.0 (with a warning) so one broken sample cannot sink a
/// batch; under [`FailurePolicy::Abort`] the error propagates.
pub async fn score_pool(
    grader: &Grader,
    rubric: &Rubric,
    pool: &CandidatePool,
) -> Result<BTreeMap<u32, f64>, GradeError> {
    let mut scores = BTreeMap::new();
    for candidate in &pool.candidates {
        let conversation = Conversation::from_prompt_response(&pool.prompt, &candidate.response);
        match grader.grade_response(rubric, &conversation).await {
            Ok(report) => {
                scores.insert(candidate.candidate_id, report.normalized);
            }
            Err(err) => match grader.config().failure_policy {
                FailurePolicy::Abort => return Err(err),
                FailurePolicy::ZeroAndFlag => {
                    tracing::warn!(
                        query_id = %pool.query_id,
                        candidate_id = candidate.candidate_id,
                        error = %err,
                        "candidate grading failed; scoring as 0.0"
                    );
                    scores.insert(candidate.candidate_id, 0.0);
                }
            },
        }
    }
    Ok(scores)
}

/// Picks the candidate with the highest score among those strictly above
/// `threshold`; `None` when nothing clears it. Ties go to the lowest
/// candidate id.
pub fn select_best(scores: &BTreeMap<u32, f64>, threshold: f64) -> Option<u32> {
    let mut best: Option<(u32, f64)> = None;
    for (&candidate_id, &score) in scores {
        if score <= threshold {
            continue;
        }
        match best {
            // Strictly greater wins; ascending iteration keeps the lowest
            // id on equal scores.
            Some((_, best_score)) if score <= best_score => {}
            _ => best = Some((candidate_id, score)),
        }
    }
    best.map(|(candidate_id, _)| candidate_id)
}
