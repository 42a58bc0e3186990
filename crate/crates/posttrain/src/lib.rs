//! Post-training data flows built on rubric grading:
//!
//! - **SFT curation** ([`curate`]): grade a pool of sampled responses per
//!   query, keep the single best response only when it scores strictly above
//!   the acceptance threshold, and emit the survivors as training pairs with
//!   a full per-query audit trail.
//! - **RL rewards** ([`reward`]): serve weight-normalized rubric rewards for
//!   rollouts, looked up by query id or supplied inline, with optional
//!   overlong length shaping.

pub mod curate;
pub mod pool;
pub mod reward;

pub use curate::{curate_sft, CurationOutcome, CurationRecord, SftPair, DEFAULT_THRESHOLD};
pub use pool::{score_pool, select_best, CandidatePool, PoolCandidate, PoolError};
pub use reward::{
    compute_reward, overlong_shaping, RewardError, RewardRequest, RewardResponse, RubricStore,
    ShapingConfig, StoreEntry, StoreError,
};
