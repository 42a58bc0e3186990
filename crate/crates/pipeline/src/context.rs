//! Everything a stage needs in one place: the gateway, the configuration,
//! and the consensus grader built from it.

use std::sync::Arc;

use rubricforge_gateway::Gateway;
use rubricforge_grader::{Grader, GraderConfig};

use crate::config::PipelineConfig;

pub struct PipelineContext {
    pub gateway: Arc<Gateway>,
    pub config: PipelineConfig,
    /// Judge used to score reference responses against base rubrics.
    pub grader: Grader,
}

impl PipelineContext {
    pub fn new(gateway: Arc<Gateway>, config: PipelineConfig) -> Self {
        let grader_config = GraderConfig::new(&config.grader.backend_id, &config.grader.model);
        let grader = Grader::new(gateway.clone(), grader_config);
        PipelineContext {
            gateway,
            config,
            grader,
        }
    }
}
