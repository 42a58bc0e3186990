//! The pipeline driver: validates the corpus, schedules queries through the
//! three synthesis stages with bounded concurrency, journals every outcome,
//! and assembles the dataset in corpus order.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use futures::StreamExt;
use thiserror::Error;

use rubricforge_core::{DatasetEntry, QueryRecord, Reference, RejectEntry, Strictness};
use rubricforge_gateway::Gateway;

use crate::aggregate::aggregate;
use crate::candidate::generate_candidate;
use crate::config::{ConfigError, PipelineConfig};
use crate::context::PipelineContext;
use crate::evolve::{evolve, select_reference_pair};
use crate::journal::{read_journal, JournalLine, JournalWriter, QueryOutcome};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("JOURNAL_IO: {path}: {source}")]
    JournalIo {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Everything a run produced, in corpus order.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineReport {
    pub dataset: Vec<DatasetEntry>,
    pub rejects: Vec<RejectEntry>,
    /// Queries restored from the journal instead of recomputed.
    pub resumed: usize,
}

/// Synthesizes a rubric per corpus query: generate candidates, aggregate
/// them into a base rubric, evolve it against the two strongest references.
///
/// Structurally invalid queries are rejected up front (stage `ingest`).
/// With a journal path, previously settled queries are restored rather than
/// recomputed, and every newly settled query is appended as it finishes —
/// so re-running after an interruption converges on the same dataset.
/// Results come back in corpus order regardless of completion order.
pub async fn run_pipeline(
    gateway: Arc<Gateway>,
    config: PipelineConfig,
    corpus: &[QueryRecord],
    journal_path: Option<&Path>,
) -> Result<PipelineReport, PipelineError> {
    config.validate()?;
    let ctx = Arc::new(PipelineContext::new(gateway, config));

    let journal_io = |source: std::io::Error| PipelineError::JournalIo {
        path: journal_path.unwrap_or_else(|| Path::new("")).to_path_buf(),
        source,
    };

    // Ingest pass: corpus-order slots, structural rejects settled here.
    let mut ingest_rejects: BTreeMap<usize, RejectEntry> = BTreeMap::new();
    let mut seen_ids: BTreeSet<&str> = BTreeSet::new();
    let mut pending: Vec<&QueryRecord> = Vec::new();
    for (index, query) in corpus.iter().enumerate() {
        let reject = |error: String| RejectEntry {
            id: query.id.clone(),
            stage: "ingest".to_string(),
            error,
        };
        if let Err(err) = query.validate() {
            ingest_rejects.insert(index, reject(err.to_string()));
            continue;
        }
        if !seen_ids.insert(&query.id) {
            ingest_rejects.insert(
                index,
                reject(format!("DUPLICATE_QUERY: corpus repeats id `{}`", query.id)),
            );
            continue;
        }
        if query.references.is_empty() {
            ingest_rejects.insert(
                index,
                reject("NO_REFERENCES: query has no reference responses".to_string()),
            );
            continue;
        }
        pending.push(query);
    }

    // Resume pass: anything already journaled is settled.
    let mut outcomes: BTreeMap<String, QueryOutcome> = match journal_path {
        Some(path) => read_journal(path).map_err(journal_io)?,
        None => BTreeMap::new(),
    };
    let pending_ids: BTreeSet<&str> = pending.iter().map(|q| q.id.as_str()).collect();
    outcomes.retain(|id, _| {
        let known = pending_ids.contains(id.as_str());
        if !known {
            tracing::warn!(query_id = %id, "journal entry has no matching corpus query; ignored");
        }
        known
    });
    let resumed = outcomes.len();
    let todo: Vec<&QueryRecord> = pending
        .iter()
        .copied()
        .filter(|q| !outcomes.contains_key(&q.id))
        .collect();

    let mut writer = match journal_path {
        Some(path) => Some(JournalWriter::append(path).map_err(journal_io)?),
        None => None,
    };

    // Synthesis pass: bounded fan-out, journaling as queries settle.
    let mut stream = futures::stream::iter(todo.into_iter().map(|query| {
        let ctx = Arc::clone(&ctx);
        async move {
            let outcome = process_query(&ctx, query).await;
            (query.id.clone(), outcome)
        }
    }))
    .buffer_unordered(ctx.config.concurrency_limit);

    while let Some((id, outcome)) = stream.next().await {
        if let Some(writer) = writer.as_mut() {
            writer
                .write(&JournalLine {
                    id: id.clone(),
                    outcome: outcome.clone(),
                })
                .map_err(journal_io)?;
        }
        outcomes.insert(id, outcome);
    }
    drop(stream);

    // Assembly pass: corpus order, one slot per input query.
    let mut dataset = Vec::new();
    let mut rejects = Vec::new();
    let mut emitted: BTreeSet<&str> = BTreeSet::new();
    for (index, query) in corpus.iter().enumerate() {
        if let Some(reject) = ingest_rejects.remove(&index) {
            rejects.push(reject);
            continue;
        }
        if !emitted.insert(&query.id) {
            continue; // duplicate occurrences were rejected at ingest
        }
        match outcomes.get(&query.id) {
            Some(QueryOutcome::Done(entry)) => dataset.push(entry.clone()),
            Some(QueryOutcome::Rejected(reject)) => rejects.push(reject.clone()),
            None => unreachable!("every pending query settles"),
        }
    }

    Ok(PipelineReport {
        dataset,
        rejects,
        resumed,
    })
}

async fn process_query(ctx: &PipelineContext, query: &QueryRecord) -> QueryOutcome {
    match synthesize(ctx, query).await {
        Ok(entry) => QueryOutcome::Done(entry),
        Err((stage, error)) => {
            tracing::warn!(query_id = %query.id, stage, error = %error, "query rejected");
            QueryOutcome::Rejected(RejectEntry {
                id: query.id.clone(),
                stage: stage.to_string(),
                error,
            })
        }
    }
}

async fn synthesize(
    ctx: &PipelineContext,
    query: &QueryRecord,
) -> Result<DatasetEntry, (&'static str, String)> {
    // Stage 1: one candidate per generator (x reference when configured).
    let references: Vec<&Reference> = if ctx.config.use_all_references {
        query.references.iter().collect()
    } else {
        query.references.iter().take(1).collect()
    };
    let mut candidates = Vec::new();
    let mut failures = Vec::new();
    for generator in &ctx.config.generator_models {
        for reference in &references {
            match generate_candidate(ctx, query, reference, generator).await {
                Ok(candidate) => candidates.push(candidate),
                Err(err) => failures.push(err.to_string()),
            }
        }
    }
    if !failures.is_empty() && ctx.config.profile.strictness == Strictness::Strict {
        return Err(("generate", failures.join(" | ")));
    }
    if candidates.len() < 2 {
        let mut detail = format!(
            "{} of {} candidate(s) produced; 2 required",
            candidates.len(),
            ctx.config.generator_models.len() * references.len()
        );
        if !failures.is_empty() {
            detail = format!("{detail}: {}", failures.join(" | "));
        }
        return Err(("generate", detail));
    }

    // Stage 2: fold candidates into the base rubric.
    let base = aggregate(ctx, query, &candidates)
        .await
        .map_err(|err| ("aggregate", err.to_string()))?;

    // Stage 3: contrast the two strongest references and merge additions.
    let pair = select_reference_pair(ctx, query, &base)
        .await
        .map_err(|err| ("evolve", err.to_string()))?;
    let final_rubric = evolve(ctx, query, &base, pair.as_ref())
        .await
        .map_err(|err| ("evolve", err.to_string()))?;

    Ok(DatasetEntry {
        id: query.id.clone(),
        domain: query.domain,
        prompt: query.prompt.clone(),
        rubric: final_rubric.criteria,
    })
}
