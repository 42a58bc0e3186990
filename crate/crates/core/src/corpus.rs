//! Corpus record types shared by the synthesis pipeline and the tools that
//! consume its output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::criterion::Criterion;

/// Task domain of a query. Serialized in snake_case
/// (`"instruction_following"`, `"science"`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Science,
    InstructionFollowing,
    Writing,
    Medical,
    Chat,
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Domain::Science => "science",
            Domain::InstructionFollowing => "instruction_following",
            Domain::Writing => "writing",
            Domain::Medical => "medical",
            Domain::Chat => "chat",
        };
        f.write_str(s)
    }
}

/// One pre-collected response to a query, tagged with the model it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reference {
    pub model_id: String,
    pub response: String,
}

/// One input query with its pool of reference responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub id: String,
    pub domain: Domain,
    pub prompt: String,
    #[serde(default)]
    pub references: Vec<Reference>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("query `{id}`: empty id")]
    EmptyId { id: String },
    #[error("query `{id}`: empty prompt")]
    EmptyPrompt { id: String },
    #[error("query `{id}`: duplicate reference model `{model_id}`")]
    DuplicateReference { id: String, model_id: String },
}

impl QueryRecord {
    /// Structural invariants: non-empty id and prompt, references distinct
    /// by model id.
    pub fn validate(&self) -> Result<(), CorpusError> {
        if self.id.trim().is_empty() {
            return Err(CorpusError::EmptyId {
                id: self.id.clone(),
            });
        }
        if self.prompt.trim().is_empty() {
            return Err(CorpusError::EmptyPrompt {
                id: self.id.clone(),
            });
        }
        let mut seen = std::collections::BTreeSet::new();
        for r in &self.references {
            if !seen.insert(r.model_id.as_str()) {
                return Err(CorpusError::DuplicateReference {
                    id: self.id.clone(),
                    model_id: r.model_id.clone(),
                });
            }
        }
        Ok(())
    }
}

/// One line of the synthesized rubric dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetEntry {
    pub id: String,
    pub domain: Domain,
    pub prompt: String,
    pub rubric: Vec<Criterion>,
}

/// One line of the reject log: a query dropped by the pipeline, with the
/// stage that dropped it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RejectEntry {
    pub id: String,
    pub stage: String,
    pub error: String,
}
