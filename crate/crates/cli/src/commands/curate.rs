//! `rubricforge curate`: rejection-sample SFT pairs from candidate pools.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Result};

use rubricforge_core::{read_jsonl, read_jsonl_lenient, write_jsonl};
use rubricforge_posttrain::{curate_sft, CandidatePool, RubricStore};

use crate::config::LoadedConfig;
use crate::GlobalFlags;

pub struct CurateArgs {
    pub dataset: PathBuf,
    pub pools: PathBuf,
    pub out_sft: PathBuf,
    pub out_audit: PathBuf,
}

pub async fn run(loaded: &LoadedConfig, flags: &GlobalFlags, args: &CurateArgs) -> Result<()> {
    let gateway = Arc::new(loaded.app.build_gateway(&loaded.dir)?);
    let grader = loaded.app.build_grader(gateway)?;
    let store = RubricStore::load_jsonl(&args.dataset, grader.registry(), flags.lenient)?;

    let pools: Vec<CandidatePool> = if flags.lenient {
        let (pools, skipped) = read_jsonl_lenient(&args.pools)?;
        for (line, error) in &skipped {
            eprintln!("{}:{line}: skipped malformed line: {error}", args.pools.display());
        }
        pools
    } else {
        read_jsonl(&args.pools)?
    };

    let mut seen = BTreeSet::new();
    for pool in &pools {
        if !seen.insert(pool.query_id.as_str()) {
            bail!("DUPLICATE_QUERY: pools repeat query `{}`", pool.query_id);
        }
    }
    let expected = loaded.app.curation.k;
    for pool in &pools {
        if pool.candidates.len() != expected {
            eprintln!(
                "pool `{}` has {} candidate(s); configured k is {expected}",
                pool.query_id,
                pool.candidates.len()
            );
        }
    }

    let threshold = flags.tau.unwrap_or(loaded.app.curation.tau);
    let rubrics = store.rubric_map();
    let outcome = curate_sft(&grader, &rubrics, &pools, threshold).await;

    write_jsonl(&args.out_sft, &outcome.pairs)?;
    write_jsonl(&args.out_audit, &outcome.records)?;

    let discard = 100.0 * (1.0 - outcome.keep_rate());
    println!(
        "curated {} pair(s) from {} pool(s); discard rate {discard:.1}% at threshold {threshold}",
        outcome.pairs.len(),
        outcome.records.len()
    );
    Ok(())
}
