//! Rubric synthesis, grading, curation, serving, and analytics from one
//! binary. Exit codes: 0 success, 1 configuration/IO/schema failure, 2
//! usage error.

mod commands;
mod config;
mod lines;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use rubricforge_core::Polarity;

use commands::analyze::{AgreementArgs, BestOfNArgs, DensityArgs, StatsArgs};
use commands::curate::CurateArgs;
use commands::grade::GradeArgs;
use commands::pipeline::PipelineArgs;
use commands::serve::ServeArgs;
use config::LoadedConfig;

#[derive(Parser)]
#[command(
    name = "rubricforge",
    version,
    about = "Coarse-to-fine rubric synthesis and rubric-based grading",
    propagate_version = true
)]
struct Cli {
    /// Application config file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Tolerate per-item failures: skip malformed or unmatched lines with a
    /// note on stderr instead of aborting.
    #[arg(long, global = true)]
    lenient: bool,
    /// Continue an interrupted pipeline run from its journal.
    #[arg(long, global = true)]
    resume: bool,
    /// Curation threshold override; kept candidates must score strictly
    /// above it.
    #[arg(long, global = true, value_name = "TAU", value_parser = parse_tau)]
    tau: Option<f64>,
    /// Weight-polarity override for synthesized rubrics.
    #[arg(long, global = true, value_enum, value_name = "PROFILE")]
    profile: Option<ProfileArg>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProfileArg {
    /// Every criterion weight must be positive.
    Positive,
    /// Every criterion weight must be negative.
    Penalty,
    /// Reward and pitfall criteria side by side.
    Mixed,
}

impl ProfileArg {
    fn polarity(self) -> Polarity {
        match self {
            ProfileArg::Positive => Polarity::PositiveOnly,
            ProfileArg::Penalty => Polarity::PenaltyOnly,
            ProfileArg::Mixed => Polarity::Mixed,
        }
    }
}

fn parse_tau(text: &str) -> Result<f64, String> {
    let value: f64 = text.parse().map_err(|e| format!("{e}"))?;
    if (0.0..1.0).contains(&value) {
        Ok(value)
    } else {
        Err(format!("must be in [0, 1), got {value}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize rubrics for a query corpus (generate, aggregate, evolve).
    Pipeline {
        /// Query corpus, one query per line.
        #[arg(long, value_name = "PATH")]
        corpus: PathBuf,
        /// Output dataset of prompt + rubric lines.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Reject log; defaults to the output path with a rejects.jsonl
        /// extension.
        #[arg(long, value_name = "PATH")]
        rejects: Option<PathBuf>,
    },
    /// Grade responses against a rubric dataset.
    Grade {
        /// Rubric dataset produced by the pipeline.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
        /// Responses to grade: lines of {"id", "response"}.
        #[arg(long, value_name = "PATH")]
        responses: PathBuf,
        /// Output score reports, one per response.
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
    /// Keep each query's best sampled response when it clears the threshold.
    Curate {
        /// Rubric dataset produced by the pipeline.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
        /// Candidate pools: lines of {"query_id", "prompt", "candidates"}.
        #[arg(long, value_name = "PATH")]
        pools: PathBuf,
        /// Output SFT pairs.
        #[arg(long, value_name = "PATH")]
        out_sft: PathBuf,
        /// Output per-query audit records.
        #[arg(long, value_name = "PATH")]
        out_audit: PathBuf,
    },
    /// Serve rewards, grading, and analytics over HTTP.
    Serve {
        /// Rubric dataset produced by the pipeline.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
        /// Listen address.
        #[arg(long, value_name = "ADDR", default_value = "127.0.0.1:8080")]
        bind: String,
    },
    /// Reports over graded or synthesized data.
    Analyze {
        #[command(subcommand)]
        report: AnalyzeCommand,
    },
}

#[derive(Subcommand)]
enum AnalyzeCommand {
    /// Cohen's kappa and F1 between two raters' boolean labels.
    Agreement {
        /// Label pairs: lines of {"a", "b"}.
        #[arg(long, value_name = "PATH")]
        labels: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Histogram of normalized scores in [0, 1].
    Density {
        /// Scores: bare numbers or objects with a normalized/score field.
        #[arg(long, value_name = "PATH")]
        scores: PathBuf,
        #[arg(long, value_name = "N", default_value_t = 10)]
        bins: usize,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Also write the histogram as x,y,source CSV.
        #[arg(long, value_name = "PATH")]
        csv: Option<PathBuf>,
    },
    /// Dataset composition: criteria counts, kinds, weights, by domain.
    Stats {
        /// Rubric dataset produced by the pipeline.
        #[arg(long, value_name = "PATH")]
        dataset: PathBuf,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Mean best score as a function of samples drawn per query.
    BestOfN {
        /// Scored pools: lines of {"id", "scores"}.
        #[arg(long, value_name = "PATH")]
        scores: PathBuf,
        /// Curve length; defaults to the smallest pool size.
        #[arg(long, value_name = "N")]
        max_n: Option<usize>,
        /// Write the report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// Settings shared by every subcommand.
pub struct GlobalFlags {
    pub lenient: bool,
    pub resume: bool,
    pub tau: Option<f64>,
    polarity: Option<Polarity>,
}

impl GlobalFlags {
    pub fn polarity(&self) -> Option<Polarity> {
        self.polarity
    }
}

/// Commands that talk to model backends need `--config`; omitting it is a
/// usage error, while an unreadable or invalid file is a runtime failure.
enum CliFailure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for CliFailure {
    fn from(error: anyhow::Error) -> Self {
        CliFailure::Runtime(error)
    }
}

fn require_config(path: Option<&PathBuf>) -> Result<LoadedConfig, CliFailure> {
    let Some(path) = path else {
        return Err(CliFailure::Usage(
            "this command needs --config <PATH>".to_string(),
        ));
    };
    Ok(LoadedConfig::load(path)?)
}

async fn dispatch(cli: Cli) -> Result<(), CliFailure> {
    let flags = GlobalFlags {
        lenient: cli.lenient,
        resume: cli.resume,
        tau: cli.tau,
        polarity: cli.profile.map(ProfileArg::polarity),
    };
    match cli.command {
        Command::Pipeline { corpus, out, rejects } => {
            let loaded = require_config(cli.config.as_ref())?;
            let args = PipelineArgs { corpus, out, rejects };
            commands::pipeline::run(&loaded, &flags, &args).await?;
        }
        Command::Grade { dataset, responses, out } => {
            let loaded = require_config(cli.config.as_ref())?;
            let args = GradeArgs { dataset, responses, out };
            commands::grade::run(&loaded, &flags, &args).await?;
        }
        Command::Curate { dataset, pools, out_sft, out_audit } => {
            let loaded = require_config(cli.config.as_ref())?;
            let args = CurateArgs { dataset, pools, out_sft, out_audit };
            commands::curate::run(&loaded, &flags, &args).await?;
        }
        Command::Serve { dataset, bind } => {
            let loaded = require_config(cli.config.as_ref())?;
            let args = ServeArgs { dataset, bind };
            commands::serve::run(&loaded, &flags, &args).await?;
        }
        Command::Analyze { report } => match report {
            AnalyzeCommand::Agreement { labels, out } => {
                commands::analyze::agreement(&flags, &AgreementArgs { labels, out })?;
            }
            AnalyzeCommand::Density { scores, bins, out, csv } => {
                commands::analyze::density(&flags, &DensityArgs { scores, bins, out, csv })?;
            }
            AnalyzeCommand::Stats { dataset, out } => {
                commands::analyze::stats(&flags, &StatsArgs { dataset, out })?;
            }
            AnalyzeCommand::BestOfN { scores, max_n, out } => {
                commands::analyze::best_of_n(&flags, &BestOfNArgs { scores, max_n, out })?;
            }
        },
    }
    Ok(())
}

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();

    let cli = Cli::parse();
    match dispatch(cli).await {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliFailure::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
        Err(CliFailure::Runtime(error)) => {
            eprintln!("error: {error:#}");
            ExitCode::from(1)
        }
    }
}
