//! `rubricforge analyze`: agreement, density, dataset, and best-of-n reports.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;

use rubricforge_analysis::{
    agreement_from_pairs, best_of_n_curve, dataset_stats, density_csv, score_density, LabelPair,
};
use rubricforge_core::{read_jsonl, read_jsonl_lenient, DatasetEntry};

use crate::lines::{ScoreLine, ScoredPoolLine};
use crate::GlobalFlags;

pub struct AgreementArgs {
    pub labels: PathBuf,
    pub out: Option<PathBuf>,
}

pub struct DensityArgs {
    pub scores: PathBuf,
    pub bins: usize,
    pub out: Option<PathBuf>,
    pub csv: Option<PathBuf>,
}

pub struct StatsArgs {
    pub dataset: PathBuf,
    pub out: Option<PathBuf>,
}

pub struct BestOfNArgs {
    pub scores: PathBuf,
    pub max_n: Option<usize>,
    pub out: Option<PathBuf>,
}

fn read_lines<T: DeserializeOwned>(path: &Path, lenient: bool) -> Result<Vec<T>> {
    if lenient {
        let (items, skipped) = read_jsonl_lenient(path)?;
        for (line, error) in &skipped {
            eprintln!("{}:{line}: skipped malformed line: {error}", path.display());
        }
        Ok(items)
    } else {
        Ok(read_jsonl(path)?)
    }
}

/// Pretty JSON to stdout, or to `--out` when given.
fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing report to {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

pub fn agreement(flags: &GlobalFlags, args: &AgreementArgs) -> Result<()> {
    let pairs: Vec<LabelPair> = read_lines(&args.labels, flags.lenient)?;
    let report = agreement_from_pairs(&pairs)?;
    emit(&report, args.out.as_deref())
}

pub fn density(flags: &GlobalFlags, args: &DensityArgs) -> Result<()> {
    let lines: Vec<ScoreLine> = read_lines(&args.scores, flags.lenient)?;
    let scores: Vec<f64> = lines.into_iter().map(ScoreLine::value).collect();
    let report = score_density(&scores, args.bins)?;
    if let Some(csv_path) = &args.csv {
        let csv = density_csv(&[("scores", &report)]);
        std::fs::write(csv_path, csv)
            .with_context(|| format!("writing CSV to {}", csv_path.display()))?;
    }
    emit(&report, args.out.as_deref())
}

pub fn stats(flags: &GlobalFlags, args: &StatsArgs) -> Result<()> {
    let entries: Vec<DatasetEntry> = read_lines(&args.dataset, flags.lenient)?;
    let report = dataset_stats(&entries);
    emit(&report, args.out.as_deref())
}

pub fn best_of_n(flags: &GlobalFlags, args: &BestOfNArgs) -> Result<()> {
    let lines: Vec<ScoredPoolLine> = read_lines(&args.scores, flags.lenient)?;
    let mut pools: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for line in lines {
        if pools.contains_key(&line.id) {
            bail!("DUPLICATE_QUERY: scored pools repeat query `{}`", line.id);
        }
        pools.insert(line.id, line.scores);
    }
    let max_n = match args.max_n {
        Some(n) => n,
        None => pools
            .values()
            .map(Vec::len)
            .min()
            .context("EMPTY_INPUT: best-of-n needs at least one query pool")?,
    };
    let curve = best_of_n_curve(&pools, max_n)?;
    emit(&curve, args.out.as_deref())
}
