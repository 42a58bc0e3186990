//! The application config file: backend registry, pipeline roles, grading
//! and curation knobs, and filesystem paths.

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use rubricforge_gateway::{BackendOptions, Gateway, HttpBackend, MockBackend};
use rubricforge_grader::{FailurePolicy, Grader, GraderConfig};
use rubricforge_pipeline::PipelineConfig;
use rubricforge_posttrain::ShapingConfig;

/// One upstream model endpoint (or a scripted stand-in for offline runs).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendEntry {
    pub id: String,
    #[serde(default)]
    pub kind: BackendKind,
    /// Chat-completions base URL; required for `http` backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_url: Option<String>,
    /// Reply script path; required for `mock` backends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub script: Option<PathBuf>,
    /// Default model name for roles that reference this backend without
    /// naming a model themselves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    /// Calls per minute; unpaced when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate_limit: Option<u32>,
    #[serde(default = "default_max_retries")]
    pub max_retries: u32,
    #[serde(default = "default_timeout_secs")]
    pub timeout_secs: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Http,
    Mock,
}

fn default_max_retries() -> u32 {
    2
}
fn default_timeout_secs() -> u64 {
    120
}

/// Judge-model settings for grading workflows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradingSection {
    pub grader_backend: String,
    /// Judge model; falls back to the backend's default model.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<String>,
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
}

fn default_concurrency() -> usize {
    8
}

/// Rejection-sampling knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurationSection {
    /// Score a candidate must exceed to be kept.
    pub tau: f64,
    /// Candidates sampled per query; pools of a different size draw a
    /// warning, not an error.
    pub k: usize,
}

impl Default for CurationSection {
    fn default() -> Self {
        CurationSection { tau: 0.6, k: 6 }
    }
}

/// Filesystem locations the tool writes to.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PathsSection {
    /// Completion cache; caching is off when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache_dir: Option<PathBuf>,
    /// Where pipeline journals live; next to the output file when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub journal_dir: Option<PathBuf>,
}

/// A parsed config plus the directory it was loaded from, which anchors
/// relative paths inside it.
pub struct LoadedConfig {
    pub app: AppConfig,
    pub dir: PathBuf,
}

impl LoadedConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let app = AppConfig::load(path)?;
        let dir = path
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(LoadedConfig { app, dir })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AppConfig {
    pub backends: Vec<BackendEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grading: Option<GradingSection>,
    #[serde(default)]
    pub curation: CurationSection,
    #[serde(default)]
    pub shaping: ShapingConfig,
    #[serde(default)]
    pub paths: PathsSection,
}

impl AppConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: AppConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        config.validate()?;
        Ok(config)
    }

    fn backend(&self, id: &str) -> Option<&BackendEntry> {
        self.backends.iter().find(|b| b.id == id)
    }

    pub fn validate(&self) -> Result<()> {
        if self.backends.is_empty() {
            bail!("config declares no backends");
        }
        let mut seen = std::collections::BTreeSet::new();
        for backend in &self.backends {
            if !seen.insert(&backend.id) {
                bail!("config repeats backend id `{}`", backend.id);
            }
            match backend.kind {
                BackendKind::Http if backend.base_url.is_none() => {
                    bail!("http backend `{}` needs a base_url", backend.id);
                }
                BackendKind::Mock if backend.script.is_none() => {
                    bail!("mock backend `{}` needs a script path", backend.id);
                }
                _ => {}
            }
        }
        if let Some(pipeline) = &self.pipeline {
            let roles = pipeline
                .generator_models
                .iter()
                .chain([&pipeline.aggregator, &pipeline.evolver, &pipeline.grader]);
            for role in roles {
                if self.backend(&role.backend_id).is_none() {
                    bail!(
                        "pipeline references backend `{}`, which is not declared",
                        role.backend_id
                    );
                }
            }
        }
        if let Some(grading) = &self.grading {
            let Some(backend) = self.backend(&grading.grader_backend) else {
                bail!(
                    "grading references backend `{}`, which is not declared",
                    grading.grader_backend
                );
            };
            if grading.model.is_none() && backend.model.is_none() {
                bail!(
                    "grading backend `{}` needs a model (set grading.model or the backend's model)",
                    grading.grader_backend
                );
            }
        }
        if !(0.0..1.0).contains(&self.curation.tau) {
            bail!("curation.tau must be in [0, 1), got {}", self.curation.tau);
        }
        if self.curation.k == 0 {
            bail!("curation.k must be at least 1");
        }
        Ok(())
    }

    /// Builds the gateway with every declared backend registered. Relative
    /// mock script paths resolve against the config file's directory.
    pub fn build_gateway(&self, config_dir: &Path) -> Result<Gateway> {
        let mut gateway = match &self.paths.cache_dir {
            Some(dir) => Gateway::with_cache_dir(dir)
                .with_context(|| format!("opening cache dir {}", dir.display()))?,
            None => Gateway::new(),
        };
        for backend in &self.backends {
            let options = BackendOptions {
                rate_limit_per_minute: backend.rate_limit,
                max_retries: backend.max_retries,
                ..BackendOptions::default()
            };
            match backend.kind {
                BackendKind::Http => {
                    let base_url = backend.base_url.as_ref().expect("validated");
                    gateway.register(
                        Arc::new(HttpBackend::new(
                            &backend.id,
                            base_url,
                            Duration::from_secs(backend.timeout_secs),
                        )),
                        options,
                    );
                }
                BackendKind::Mock => {
                    let script_path = backend.script.as_ref().expect("validated");
                    let script_path = if script_path.is_relative() {
                        config_dir.join(script_path)
                    } else {
                        script_path.clone()
                    };
                    let script = std::fs::read_to_string(&script_path).with_context(|| {
                        format!(
                            "reading mock script {} for backend `{}`",
                            script_path.display(),
                            backend.id
                        )
                    })?;
                    let mock = MockBackend::from_script_json(&backend.id, &script)
                        .with_context(|| format!("parsing mock script for `{}`", backend.id))?;
                    gateway.register(Arc::new(mock), options);
                }
            }
        }
        Ok(gateway)
    }

    /// Builds the judge grader from the grading section.
    pub fn build_grader(&self, gateway: Arc<Gateway>) -> Result<Grader> {
        let Some(grading) = &self.grading else {
            bail!("this command needs a grading section in the config");
        };
        let backend = self.backend(&grading.grader_backend).expect("validated");
        let model = grading
            .model
            .as_ref()
            .or(backend.model.as_ref())
            .expect("validated");
        let mut grader_config = GraderConfig::new(&grading.grader_backend, model);
        grader_config.concurrency = grading.concurrency;
        grader_config.failure_policy = grading.failure_policy;
        Ok(Grader::new(gateway, grader_config))
    }
}
