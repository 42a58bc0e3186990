//! `rubricforge pipeline`: synthesize rubrics for a query corpus.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{Context, Result};

use rubricforge_core::{read_jsonl, read_jsonl_lenient, write_jsonl, QueryRecord, Strictness};
use rubricforge_pipeline::run_pipeline;

use crate::config::{AppConfig, LoadedConfig};
use crate::GlobalFlags;

pub struct PipelineArgs {
    pub corpus: PathBuf,
    pub out: PathBuf,
    pub rejects: Option<PathBuf>,
}

/// Journal location: under `paths.journal_dir` when configured, else next to
/// the output file.
fn journal_path(config: &AppConfig, out: &Path) -> PathBuf {
    match &config.paths.journal_dir {
        Some(dir) => {
            let stem = out
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| "pipeline".to_string());
            dir.join(format!("{stem}.journal.jsonl"))
        }
        None => out.with_extension("journal.jsonl"),
    }
}

pub async fn run(loaded: &LoadedConfig, flags: &GlobalFlags, args: &PipelineArgs) -> Result<()> {
    let config = &loaded.app;
    let mut pipeline_config = config
        .pipeline
        .clone()
        .context("this command needs a pipeline section in the config")?;
    if let Some(polarity) = flags.polarity() {
        pipeline_config.profile.polarity = polarity;
    }
    if flags.lenient {
        pipeline_config.profile.strictness = Strictness::Lenient;
    }

    let corpus: Vec<QueryRecord> = if flags.lenient {
        let (records, skipped) = read_jsonl_lenient(&args.corpus)?;
        for (line, error) in &skipped {
            eprintln!("{}:{line}: skipped malformed line: {error}", args.corpus.display());
        }
        records
    } else {
        read_jsonl(&args.corpus)?
    };

    let journal = journal_path(config, &args.out);
    if let Some(parent) = journal.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)
                .with_context(|| format!("creating journal dir {}", parent.display()))?;
        }
    }
    if !flags.resume && journal.exists() {
        std::fs::remove_file(&journal)
            .with_context(|| format!("clearing stale journal {}", journal.display()))?;
    }

    let gateway = Arc::new(config.build_gateway(&loaded.dir)?);
    let report = run_pipeline(gateway, pipeline_config, &corpus, Some(&journal)).await?;

    write_jsonl(&args.out, &report.dataset)?;
    let rejects_path = args
        .rejects
        .clone()
        .unwrap_or_else(|| args.out.with_extension("rejects.jsonl"));
    write_jsonl(&rejects_path, &report.rejects)?;

    let mut by_stage: BTreeMap<&str, usize> = BTreeMap::new();
    for reject in &report.rejects {
        *by_stage.entry(reject.stage.as_str()).or_default() += 1;
    }
    let resumed = if report.resumed > 0 {
        format!(" ({} from journal)", report.resumed)
    } else {
        String::new()
    };
    println!(
        "synthesized {} rubric(s), rejected {}{resumed}",
        report.dataset.len(),
        report.rejects.len()
    );
    if !by_stage.is_empty() {
        let histogram: Vec<String> = by_stage
            .iter()
            .map(|(stage, count)| format!("{stage} {count}"))
            .collect();
        println!("rejects by stage: {}", histogram.join(", "));
    }
    Ok(())
}
