//! Shared state behind every handler.

use rubricforge_grader::Grader;
use rubricforge_posttrain::{RubricStore, ShapingConfig};

/// One grader, one rubric store, one shaping window — shared by all
/// requests.
pub struct ServiceState {
    pub grader: Grader,
    pub store: RubricStore,
    pub shaping: ShapingConfig,
}

impl ServiceState {
    pub fn new(grader: Grader, store: RubricStore, shaping: ShapingConfig) -> Self {
        ServiceState {
            grader,
            store,
            shaping,
        }
    }
}
