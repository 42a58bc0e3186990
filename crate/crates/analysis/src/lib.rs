//! Analytics over rubric-graded data: inter-rater agreement, score
//! distributions, best-of-n scaling, and dataset composition statistics.

pub mod agreement;
pub mod best_of_n;
pub mod density;
pub mod stats;

pub use agreement::{
    agreement_from_pairs, agreement_report, AgreementError, AgreementReport, Confusion, LabelPair,
};
pub use best_of_n::{best_of_n_curve, BestOfNError, BestOfNPoint};
pub use density::{bin_index, density_csv, score_density, DensityError, ScoreDensity};
pub use stats::{dataset_stats, DatasetStats, RubricStats};
