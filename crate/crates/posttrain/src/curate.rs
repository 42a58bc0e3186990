//! Rejection-sampling curation: grade each query's candidate pool, keep the
//! best response only when it clears the quality threshold, and emit the
//! survivors as SFT pairs alongside a full audit trail.

use serde::{Deserialize, Serialize};

use rubricforge_core::Rubric;
use rubricforge_grader::Grader;
use std::collections::BTreeMap;

use crate::pool::{score_pool, select_best, CandidatePool};

/// Default acceptance threshold: a candidate must score strictly above this
/// to be kept.
pub const DEFAULT_THRESHOLD: f64 = 0.6;

/// Audit record for one query's pool, kept or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurationRecord {
    pub query_id: String,
    /// Normalized score per candidate id.
    pub scores: BTreeMap<u32, f64>,
    /// Winning candidate id, when one cleared the threshold.
    pub selected: Option<u32>,
    pub threshold: f64,
    /// Why this query produced no SFT pair for reasons other than scores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// One curated training pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SftPair {
    pub id: String,
    pub prompt: String,
    pub response: String,
    pub score: f64,
}

/// Curated pairs plus one record per input pool.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CurationOutcome {
    pub pairs: Vec<SftPair>,
    pub records: Vec<CurationRecord>,
}

impl CurationOutcome {
    /// Fraction of pools that produced a pair.
    pub fn keep_rate(&self) -> f64 {
        if self.records.is_empty() {
            0.0
        } else {
            self.pairs.len() as f64 / self.records.len() as f64
        }
    }
}

/// Grades each pool against its rubric and keeps the best candidate strictly
/// above `threshold`.
///
/// Pools are processed in input order. A pool that cannot be scored at all —
/// invalid pool, missing rubric, or aborting grade failure — is recorded
/// with an error and skipped; curation continues with the rest.
pub async fn curate_sft(
    grader: &Grader,
    rubrics: &BTreeMap<String, Rubric>,
    pools: &[CandidatePool],
    threshold: f64,
) -> CurationOutcome {
    let mut outcome = CurationOutcome::default();
    for pool in pools {
        let mut record = CurationRecord {
            query_id: pool.query_id.clone(),
            scores: BTreeMap::new(),
            selected: None,
            threshold,
            error: None,
        };
        match curate_one(grader, rubrics, pool, threshold).await {
            Ok((scores, selected)) => {
                if let Some(candidate_id) = selected {
                    let candidate = pool
                        .candidates
                        .iter()
                        .find(|c| c.candidate_id == candidate_id)
                        .expect("selected id comes from this pool");
                    outcome.pairs.push(SftPair {
                        id: pool.query_id.clone(),
                        prompt: pool.prompt.clone(),
                        response: candidate.response.clone(),
                        score: scores[&candidate_id],
                    });
                }
                record.scores = scores;
                record.selected = selected;
            }
            Err(reason) => {
                tracing::warn!(query_id = %pool.query_id, error = %reason, "pool skipped");
                record.error = Some(reason);
            }
        }
        outcome.records.push(record);
    }
    outcome
}

async fn curate_one(
    grader: &Grader,
    rubrics: &BTreeMap<String, Rubric>,
    pool: &CandidatePool,
    threshold: f64,
) -> Result<(BTreeMap<u32, f64>, Option<u32>), String> {
    pool.validate().map_err(|e| e.to_string())?;
    let rubric = rubrics
        .get(&pool.query_id)
        .ok_or_else(|| format!("NO_RUBRIC: no rubric for query `{}`", pool.query_id))?;
    let scores = score_pool(grader, rubric, pool)
        .await
        .map_err(|e| e.to_string())?;
    let selected = select_best(&scores, threshold);
    Ok((scores, selected))
}
