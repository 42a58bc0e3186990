//! Three-stage rubric synthesis over a query corpus.
//!
//! Stage 1 drafts candidate rubrics from several generator models, each
//! grounded in a reference response, with a bounded validation/repair loop.
//! Stage 2 folds the candidates pairwise into one deduplicated base rubric.
//! Stage 3 grades the references against that base, contrasts the two
//! strongest, and merges any newly surfaced criteria into the final rubric.
//!
//! [`run_pipeline`] drives the whole corpus with bounded concurrency and an
//! append-only journal so interrupted runs resume instead of recomputing.

pub mod aggregate;
pub mod candidate;
pub mod config;
pub mod context;
pub mod evolve;
pub mod journal;
pub mod run;
pub mod stage;

pub use aggregate::aggregate;
pub use candidate::{generate_candidate, CandidateRubric};
pub use config::{ConfigError, ModelRef, PipelineConfig};
pub use context::PipelineContext;
pub use evolve::{evolve, select_reference_pair, ReferencePair};
pub use journal::{read_journal, JournalLine, JournalWriter, QueryOutcome};
pub use run::{run_pipeline, PipelineError, PipelineReport};
pub use stage::{resolve_kinds, rubric_prompt_json, StageError};
