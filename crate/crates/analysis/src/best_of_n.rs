//! How reward scales with candidate count: for each `n`, the mean over
//! queries of the best score among that query's first `n` candidates.
//!
//! Candidates are taken in pool order (their generation order), so the curve
//! is deterministic and reproducible rather than a sampled estimate.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BestOfNPoint {
    pub n: usize,
    /// Mean over queries of `max(scores[..n])`.
    pub mean_best: f64,
}

#[derive(Debug, Error)]
pub enum BestOfNError {
    #[error("EMPTY_INPUT: best-of-n needs at least one query pool")]
    EmptyInput,
    #[error("INVALID_N: max_n must be at least 1")]
    InvalidN,
    #[error(
        "INSUFFICIENT_CANDIDATES: query `{query_id}` has {have} candidate score(s); {need} required"
    )]
    InsufficientCandidates {
        query_id: String,
        have: usize,
        need: usize,
    },
    #[error("INVALID_SCORE: query `{query_id}` candidate {index} is not a finite number")]
    InvalidScore { query_id: String, index: usize },
}

/// Computes the best-of-n curve for `n = 1..=max_n` over per-query score
/// pools keyed by query id.
pub fn best_of_n_curve(
    pools: &BTreeMap<String, Vec<f64>>,
    max_n: usize,
) -> Result<Vec<BestOfNPoint>, BestOfNError> {
    if max_n == 0 {
        return Err(BestOfNError::InvalidN);
    }
    if pools.is_empty() {
        return Err(BestOfNError::EmptyInput);
    }
    for (query_id, scores) in pools {
        if scores.len() < max_n {
            return Err(BestOfNError::InsufficientCandidates {
                query_id: query_id.clone(),
                have: scores.len(),
                need: max_n,
            });
        }
        if let Some(index) = scores.iter().position(|s| !s.is_finite()) {
            return Err(BestOfNError::InvalidScore {
                query_id: query_id.clone(),
                index,
            });
        }
    }

    let queries = pools.len() as f64;
    let mut curve = Vec::with_capacity(max_n);
    // Running prefix maxima, one per query, extended as n grows.
    let mut best: BTreeMap<&str, f64> = pools
        .iter()
        .map(|(query_id, scores)| (query_id.as_str(), scores[0]))
        .collect();
    for n in 1..=max_n {
        if n > 1 {
            for (query_id, scores) in pools {
                let slot = best.get_mut(query_id.as_str()).expect("seeded above");
                if scores[n - 1] > *slot {
                    *slot = scores[n - 1];
                }
            }
        }
        let mean_best = best.values().sum::<f64>() / queries;
        curve.push(BestOfNPoint { n, mean_best });
    }
    Ok(curve)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn pools(entries: &[(&str, &[f64])]) -> BTreeMap<String, Vec<f64>> {
        entries
            .iter()
            .map(|(id, scores)| (id.to_string(), scores.to_vec()))
            .collect()
    }

    #[test]
    fn curve_matches_hand_computation() {
        let pools = pools(&[
            ("q1", &[0.2, 0.8, 0.5]),
            ("q2", &[0.6, 0.1, 0.9]),
        ]);
        let curve = best_of_n_curve(&pools, 3).unwrap();
        assert_eq!(curve.len(), 3);
        // n=1: mean(0.2, 0.6) = 0.4; n=2: mean(0.8, 0.6) = 0.7;
        // n=3: mean(0.8, 0.9) = 0.85.
        assert!((curve[0].mean_best - 0.4).abs() < 1e-12);
        assert!((curve[1].mean_best - 0.7).abs() < 1e-12);
        assert!((curve[2].mean_best - 0.85).abs() < 1e-12);
        assert_eq!(curve[2].n, 3);
    }

    #[test]
    fn errors_cover_empty_short_and_invalid_pools() {
        assert!(matches!(
            best_of_n_curve(&BTreeMap::new(), 2),
            Err(BestOfNError::EmptyInput)
        ));
        assert!(matches!(
            best_of_n_curve(&pools(&[("q1", &[0.5])]), 0),
            Err(BestOfNError::InvalidN)
        ));
        let err = best_of_n_curve(&pools(&[("q1", &[0.5, 0.6]), ("q2", &[0.5])]), 2).unwrap_err();
        assert!(err.to_string().contains("INSUFFICIENT_CANDIDATES"), "{err}");
        assert!(err.to_string().contains("`q2`"), "{err}");
        let err = best_of_n_curve(&pools(&[("q1", &[0.5, f64::NAN])]), 2).unwrap_err();
        assert!(err.to_string().contains("INVALID_SCORE"), "{err}");
    }

    /// Property: the curve never decreases as n grows, and every point stays
    /// within the pooled score range.
    #[test]
    fn random_pools_yield_monotone_curves() {
        let mut rng = StdRng::seed_from_u64(0xb0f);
        for case in 0..300 {
            let queries = rng.random_range(1..=8);
            let k = rng.random_range(1..=6);
            let pools: BTreeMap<String, Vec<f64>> = (0..queries)
                .map(|q| {
                    let scores: Vec<f64> = (0..k).map(|_| rng.random_range(0.0..=1.0)).collect();
                    (format!("q{q}"), scores)
                })
                .collect();
            let curve = best_of_n_curve(&pools, k).unwrap();
            assert_eq!(curve.len(), k);
            for window in curve.windows(2) {
                assert!(
                    window[1].mean_best >= window[0].mean_best - 1e-12,
                    "case {case}: curve decreased"
                );
            }
            for point in &curve {
                assert!((0.0..=1.0).contains(&point.mean_best), "case {case}");
            }
        }
    }
}
