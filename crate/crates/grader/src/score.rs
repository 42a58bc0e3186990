//! Weight-normalized scoring of a graded rubric.
//!
//! Each criterion contributes its weight when met: positive weights add,
//! penalty (negative) weights subtract. The raw sum is normalized by the
//! maximum attainable score — the sum of positive weights only — and clamped
//! into `[0, 1]`, so a response that trips penalties cannot go below zero and
//! unmet penalties cannot raise the ceiling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::Rubric;

use crate::judgment::Judgment;

/// The outcome of grading one response against one rubric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub query_id: String,
    pub judgments: Vec<Judgment>,
    /// Signed weighted sum of met criteria.
    pub raw: f64,
    /// Sum of positive weights — the best attainable raw score.
    pub s_max: f64,
    /// `clamp(raw / s_max, 0, 1)`.
    pub normalized: f64,
}

#[derive(Debug, Error)]
pub enum ScoreError {
    #[error(
        "JUDGMENT_MISMATCH: rubric for `{query_id}` has {expected} criteria but {actual} judgments \
         were supplied{detail}"
    )]
    JudgmentMismatch {
        query_id: String,
        expected: usize,
        actual: usize,
        detail: String,
    },
    #[error("NO_POSITIVE_WEIGHT: rubric for `{query_id}` has no positive-weight criteria to normalize by")]
    NoPositiveWeight { query_id: String },
}

/// Scores a rubric given one judgment per criterion, in rubric order.
///
/// Judgments must line up with the rubric's criteria by `criterion_id`;
/// weight sums are taken over `i64` so no precision is lost before the final
/// division.
pub fn score(rubric: &Rubric, judgments: Vec<Judgment>) -> Result<ScoreReport, ScoreError> {
    if judgments.len() != rubric.criteria.len() {
        return Err(ScoreError::JudgmentMismatch {
            query_id: rubric.query_id.clone(),
            expected: rubric.criteria.len(),
            actual: judgments.len(),
            detail: String::new(),
        });
    }
    let mut raw: i64 = 0;
    for (criterion, judgment) in rubric.criteria.iter().zip(&judgments) {
        if judgment.criterion_id != criterion.id {
            return Err(ScoreError::JudgmentMismatch {
                query_id: rubric.query_id.clone(),
                expected: rubric.criteria.len(),
                actual: judgments.len(),
                detail: format!(
                    "; judgment for `{}` does not match criterion `{}`",
                    judgment.criterion_id, criterion.id
                ),
            });
        }
        if judgment.criteria_met {
            raw += i64::from(criterion.weight);
        }
    }
    let s_max = rubric.s_max();
    if s_max <= 0 {
        return Err(ScoreError::NoPositiveWeight {
            query_id: rubric.query_id.clone(),
        });
    }
    let raw_f = raw as f64;
    let s_max_f = s_max as f64;
    let normalized = (raw_f / s_max_f).clamp(0.0, 1.0);
    Ok(ScoreReport {
        query_id: rubric.query_id.clone(),
        judgments,
        raw: raw_f,
        s_max: s_max_f,
        normalized,
    })
}
