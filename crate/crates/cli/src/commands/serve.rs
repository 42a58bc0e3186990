//! `rubricforge serve`: host grading, rewards, and analytics over HTTP.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::{Context, Result};

use rubricforge_posttrain::RubricStore;
use rubricforge_service::ServiceState;

use crate::config::LoadedConfig;
use crate::GlobalFlags;

pub struct ServeArgs {
    pub dataset: PathBuf,
    pub bind: String,
}

pub async fn run(loaded: &LoadedConfig, flags: &GlobalFlags, args: &ServeArgs) -> Result<()> {
    let gateway = Arc::new(loaded.app.build_gateway(&loaded.dir)?);
    let grader = loaded.app.build_grader(gateway)?;
    let store = RubricStore::load_jsonl(&args.dataset, grader.registry(), flags.lenient)?;
    let queries = store.len();

    let state = Arc::new(ServiceState::new(grader, store, loaded.app.shaping));
    let listener = tokio::net::TcpListener::bind(&args.bind)
        .await
        .with_context(|| format!("binding {}", args.bind))?;
    let addr = listener.local_addr().context("reading bound address")?;
    println!("serving {queries} rubric(s) on http://{addr}");

    let shutdown = async {
        if let Err(err) = tokio::signal::ctrl_c().await {
            tracing::error!(error = %err, "interrupt handler failed; shutting down");
        }
    };
    rubricforge_service::serve(state, listener, shutdown)
        .await
        .context("serving requests")?;
    println!("shut down cleanly");
    Ok(())
}
