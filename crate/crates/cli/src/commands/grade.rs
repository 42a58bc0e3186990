//! `rubricforge grade`: score responses against a rubric dataset.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{bail, Result};

use rubricforge_core::{read_jsonl, read_jsonl_lenient, write_jsonl};
use rubricforge_grader::{Conversation, ScoreReport};
use rubricforge_posttrain::RubricStore;

use crate::config::LoadedConfig;
use crate::lines::ResponseLine;
use crate::GlobalFlags;

pub struct GradeArgs {
    pub dataset: PathBuf,
    pub responses: PathBuf,
    pub out: PathBuf,
}

pub async fn run(loaded: &LoadedConfig, flags: &GlobalFlags, args: &GradeArgs) -> Result<()> {
    let gateway = Arc::new(loaded.app.build_gateway(&loaded.dir)?);
    let grader = loaded.app.build_grader(gateway)?;
    let store = RubricStore::load_jsonl(&args.dataset, grader.registry(), flags.lenient)?;

    let responses: Vec<ResponseLine> = if flags.lenient {
        let (lines, skipped) = read_jsonl_lenient(&args.responses)?;
        for (line, error) in &skipped {
            eprintln!(
                "{}:{line}: skipped malformed line: {error}",
                args.responses.display()
            );
        }
        lines
    } else {
        read_jsonl(&args.responses)?
    };

    let mut reports: Vec<ScoreReport> = Vec::with_capacity(responses.len());
    for line in &responses {
        let Some(entry) = store.get(&line.id) else {
            if flags.lenient {
                eprintln!("skipped response for `{}`: no rubric in the dataset", line.id);
                continue;
            }
            bail!(
                "UNKNOWN_QUERY: responses reference `{}`, which the dataset lacks",
                line.id
            );
        };
        let conversation = Conversation::from_prompt_response(&entry.prompt, &line.response);
        let report = grader.grade_response(&entry.rubric, &conversation).await?;
        reports.push(report);
    }

    write_jsonl(&args.out, &reports)?;
    if reports.is_empty() {
        println!("graded 0 response(s)");
    } else {
        let mean = reports.iter().map(|r| r.normalized).sum::<f64>() / reports.len() as f64;
        println!("graded {} response(s); mean normalized score {mean:.4}", reports.len());
    }
    Ok(())
}
