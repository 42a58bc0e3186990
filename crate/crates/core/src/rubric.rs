//! Rubrics: per-query criterion sets, stage tags, and merging.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criterion::{stable_criterion_id, Criterion};

/// Which point of the synthesis flow a rubric belongs to.
///
/// Candidate and base rubrics are subject to the criterion-count bounds;
/// final rubrics are exempt because the evolution merge may exceed them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RubricStage {
    Candidate,
    Base,
    Final,
}

/// A weighted checklist for one query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rubric {
    pub query_id: String,
    pub stage: RubricStage,
    pub criteria: Vec<Criterion>,
}

impl Rubric {
    pub fn new(query_id: impl Into<String>, stage: RubricStage, criteria: Vec<Criterion>) -> Self {
        Rubric {
            query_id: query_id.into(),
            stage,
            criteria,
        }
    }

    /// Maximum attainable raw score: the sum of positive weights.
    ///
    /// Penalty weights do not raise the ceiling; they only subtract when the
    /// described failure is present.
    pub fn s_max(&self) -> i64 {
        self.criteria
            .iter()
            .map(|c| c.weight as i64)
            .filter(|w| *w > 0)
            .sum()
    }

    /// Replaces every criterion id with the stable id for `(query_id,
    /// stage_label, position)`. Used by synthesis stages so re-runs reproduce
    /// identical ids.
    pub fn assign_stable_ids(&mut self, stage_label: &str) {
        for (i, c) in self.criteria.iter_mut().enumerate() {
            c.id = stable_criterion_id(&self.query_id, stage_label, i);
        }
    }
}

#[derive(Debug, Error)]
pub enum MergeError {
    #[error("QUERY_MISMATCH: cannot merge rubric for `{add}` into rubric for `{base}`")]
    QueryMismatch { base: String, add: String },
}

/// Set-union merge: base criteria first (order preserved), added criteria
/// appended. No deduplication is attempted — near-duplicates are kept, which
/// at worst double-counts an easy point for every response equally. Colliding
/// ids on the added side are re-suffixed (`-2`, `-3`, ...) to keep ids unique.
pub fn merge_rubrics(base: &Rubric, add: &Rubric) -> Result<Rubric, MergeError> {
    if base.query_id != add.query_id {
        return Err(MergeError::QueryMismatch {
            base: base.query_id.clone(),
            add: add.query_id.clone(),
        });
    }
    let mut used: std::collections::BTreeSet<String> =
        base.criteria.iter().map(|c| c.id.clone()).collect();
    let mut criteria = base.criteria.clone();
    for c in &add.criteria {
        let mut merged = c.clone();
        if used.contains(&merged.id) {
            let mut n = 2usize;
            loop {
                let candidate = format!("{}-{n}", c.id);
                if !used.contains(&candidate) {
                    merged.id = candidate;
                    break;
                }
                n += 1;
            }
        }
        used.insert(merged.id.clone());
        criteria.push(merged);
    }
    Ok(Rubric {
        query_id: base.query_id.clone(),
        stage: RubricStage::Final,
        criteria,
    })
}
