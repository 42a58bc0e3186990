//! Core data model for rubric-based response evaluation.
//!
//! A [`Rubric`] is a weighted checklist attached to a single query: each
//! [`Criterion`] carries an integer weight (positive for desired behaviour,
//! negative for pitfalls) and is either machine-checkable
//! ([`CriterionKind::Verifiable`]) or judged by a language model
//! ([`CriterionKind::Semantic`]).
//!
//! This crate owns the pieces that everything else builds on:
//!
//! * criterion/rubric types and their JSON wire form ([`criterion`], [`rubric`]),
//! * structural validation with strict/lenient profiles ([`validate`]),
//! * extraction of rubric arrays from raw model output ([`parse`]),
//! * routing of criteria to rule checkers vs. LLM judging ([`classify`]),
//! * corpus record types shared across the pipeline and tools ([`corpus`]),
//! * small JSONL helpers ([`jsonl`]).

pub mod classify;
pub mod corpus;
pub mod criterion;
pub mod jsonl;
pub mod parse;
pub mod rubric;
pub mod validate;

pub use classify::{classify_criterion_kind, CheckerLookup, ClassifyError};
pub use corpus::{CorpusError, DatasetEntry, Domain, QueryRecord, Reference, RejectEntry};
pub use criterion::{stable_criterion_id, Criterion, CriterionKind, Provenance};
pub use jsonl::{jsonl_string, read_jsonl, read_jsonl_lenient, write_jsonl, JsonlError};
pub use parse::{first_fenced_block, json_candidate, parse_rubric_json, RubricParseError};
pub use rubric::{merge_rubrics, MergeError, Rubric, RubricStage};
pub use validate::{
    validate_criterion, validate_rubric, Bounds, Polarity, Strictness, ValidationCode,
    ValidationIssue, ValidationProfile, ValidationReport,
};
