//! Descriptive statistics over a finished rubric dataset.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use rubricforge_core::{Criterion, CriterionKind, DatasetEntry};

/// Rubric composition counters for one group of queries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RubricStats {
    pub queries: u64,
    pub criteria: u64,
    pub verifiable_criteria: u64,
    pub semantic_criteria: u64,
    /// Criteria with negative weight.
    pub penalty_criteria: u64,
    /// Mean criteria per query; 0.0 for an empty group.
    pub mean_criteria_per_query: f64,
    /// Mean of per-query maximum attainable scores (sum of positive
    /// weights); 0.0 for an empty group.
    pub mean_s_max: f64,
}

/// Dataset-wide and per-domain rubric statistics.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub total: RubricStats,
    pub by_domain: BTreeMap<String, RubricStats>,
}

#[derive(Default)]
struct Accumulator {
    queries: u64,
    criteria: u64,
    verifiable: u64,
    semantic: u64,
    penalty: u64,
    s_max_sum: i64,
}

impl Accumulator {
    fn add(&mut self, rubric: &[Criterion]) {
        self.queries += 1;
        self.criteria += rubric.len() as u64;
        for criterion in rubric {
            match criterion.kind {
                CriterionKind::Verifiable { .. } => self.verifiable += 1,
                CriterionKind::Semantic => self.semantic += 1,
            }
            if criterion.weight < 0 {
                self.penalty += 1;
            }
        }
        self.s_max_sum += rubric
            .iter()
            .filter(|c| c.weight > 0)
            .map(|c| i64::from(c.weight))
            .sum::<i64>();
    }

    fn finish(self) -> RubricStats {
        let queries_f = self.queries as f64;
        RubricStats {
            queries: self.queries,
            criteria: self.criteria,
            verifiable_criteria: self.verifiable,
            semantic_criteria: self.semantic,
            penalty_criteria: self.penalty,
            mean_criteria_per_query: if self.queries == 0 {
                0.0
            } else {
                self.criteria as f64 / queries_f
            },
            mean_s_max: if self.queries == 0 {
                0.0
            } else {
                self.s_max_sum as f64 / queries_f
            },
        }
    }
}

/// Summarizes a dataset: totals plus a breakdown keyed by domain name.
pub fn dataset_stats(entries: &[DatasetEntry]) -> DatasetStats {
    let mut total = Accumulator::default();
    let mut by_domain: BTreeMap<String, Accumulator> = BTreeMap::new();
    for entry in entries {
        total.add(&entry.rubric);
        by_domain
            .entry(entry.domain.to_string())
            .or_default()
            .add(&entry.rubric);
    }
    DatasetStats {
        total: total.finish(),
        by_domain: by_domain
            .into_iter()
            .map(|(domain, acc)| (domain, acc.finish()))
            .collect(),
    }
}
