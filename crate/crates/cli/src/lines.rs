//! Line formats for the JSONL files the subcommands read.

use serde::{Deserialize, Serialize};

/// One response to grade, keyed by the rubric dataset's query id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResponseLine {
    pub id: String,
    pub response: String,
}

/// One query's sampled scores for the best-of-n curve, in sampling order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPoolLine {
    pub id: String,
    pub scores: Vec<f64>,
}

/// One normalized score, accepted as a bare number or as an object carrying
/// a `normalized` or `score` field (so graded output files feed straight in).
#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScoreLine {
    Bare(f64),
    Normalized { normalized: f64 },
    Score { score: f64 },
}

impl ScoreLine {
    pub fn value(self) -> f64 {
        match self {
            ScoreLine::Bare(value) => value,
            ScoreLine::Normalized { normalized } => normalized,
            ScoreLine::Score { score } => score,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn score_lines_accept_all_three_shapes() {
        let bare: ScoreLine = serde_json::from_str("0.25").unwrap();
        assert_eq!(bare.value(), 0.25);
        let report: ScoreLine = serde_json::from_str(r#"{"normalized": 0.5}"#).unwrap();
        assert_eq!(report.value(), 0.5);
        let plain: ScoreLine = serde_json::from_str(r#"{"score": 1.0}"#).unwrap();
        assert_eq!(plain.value(), 1.0);
    }

    #[test]
    fn score_lines_reject_other_shapes() {
        assert!(serde_json::from_str::<ScoreLine>(r#"{"reward": 1.0}"#).is_err());
        assert!(serde_json::from_str::<ScoreLine>(r#""high""#).is_err());
    }
}
