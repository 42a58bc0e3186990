//! Histograms over normalized scores in `[0, 1]`.
//!
//! Bins are right-closed: with `b` bins, bin `i` covers `(i/b, (i+1)/b]`,
//! except bin 0 which also includes 0. A score lands in
//! `ceil(s * b) - 1` (clamped), so 1.0 always falls in the last bin and
//! exact bin edges belong to the bin below.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreDensity {
    pub bins: usize,
    /// Count per bin, length `bins`.
    pub counts: Vec<u64>,
    pub n: u64,
    /// `None` when no scores were supplied.
    pub mean: Option<f64>,
    pub median: Option<f64>,
}

impl ScoreDensity {
    /// Midpoint of bin `i`, for plotting.
    pub fn midpoint(&self, index: usize) -> f64 {
        (index as f64 + 0.5) / self.bins as f64
    }

    /// Fraction of scores in bin `i` (0.0 when empty overall).
    pub fn fraction(&self, index: usize) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.counts[index] as f64 / self.n as f64
        }
    }
}

#[derive(Debug, Error)]
pub enum DensityError {
    #[error("INVALID_BINS: bin count must be at least 1")]
    InvalidBins,
    #[error("OUT_OF_RANGE: score at index {index} is {value}; scores must lie in [0, 1]")]
    OutOfRange { index: usize, value: f64 },
}

/// The right-closed bin for a score already known to lie in `[0, 1]`.
pub fn bin_index(score: f64, bins: usize) -> usize {
    if score <= 0.0 {
        return 0;
    }
    let raw = (score * bins as f64).ceil() as usize;
    raw.saturating_sub(1).min(bins - 1)
}

/// Bins scores into a histogram with mean and median.
///
/// NaN or out-of-range scores are rejected rather than silently clamped —
/// a reward outside `[0, 1]` upstream is a bug worth surfacing.
pub fn score_density(scores: &[f64], bins: usize) -> Result<ScoreDensity, DensityError> {
    if bins == 0 {
        return Err(DensityError::InvalidBins);
    }
    let mut counts = vec![0u64; bins];
    for (index, &score) in scores.iter().enumerate() {
        if !(0.0..=1.0).contains(&score) {
            return Err(DensityError::OutOfRange { index, value: score });
        }
        counts[bin_index(score, bins)] += 1;
    }

    let n = scores.len() as u64;
    let (mean, median) = if scores.is_empty() {
        (None, None)
    } else {
        let mean = scores.iter().sum::<f64>() / scores.len() as f64;
        let mut sorted = scores.to_vec();
        sorted.sort_by(|x, y| x.partial_cmp(y).expect("scores validated finite"));
        let mid = sorted.len() / 2;
        let median = if sorted.len() % 2 == 1 {
            sorted[mid]
        } else {
            (sorted[mid - 1] + sorted[mid]) / 2.0
        };
        (Some(mean), Some(median))
    };

    Ok(ScoreDensity {
        bins,
        counts,
        n,
        mean,
        median,
    })
}

/// Renders one or more labeled densities as `x,y,source` CSV, where `x` is
/// the bin midpoint and `y` the fraction of that source's scores in the bin.
pub fn density_csv(series: &[(&str, &ScoreDensity)]) -> String {
    let mut out = String::from("x,y,source\n");
    for (label, density) in series {
        for index in 0..density.bins {
            out.push_str(&format!(
                "{},{},{}\n",
                density.midpoint(index),
                density.fraction(index),
                label
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn eleven_point_grid_fills_ten_bins_right_closed() {
        let scores: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let density = score_density(&scores, 10).unwrap();
        // 0.0 and 0.1 both land in bin 0; every other grid point closes its bin.
        assert_eq!(density.counts, vec![2, 1, 1, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(density.n, 11);
        assert!((density.mean.unwrap() - 0.5).abs() < 1e-12);
        assert!((density.median.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn edge_scores_land_where_the_rule_says() {
        assert_eq!(bin_index(0.0, 10), 0);
        assert_eq!(bin_index(1e-9, 10), 0);
        assert_eq!(bin_index(0.1, 10), 0);
        assert_eq!(bin_index(0.1 + 1e-9, 10), 1);
        assert_eq!(bin_index(1.0, 10), 9);
        assert_eq!(bin_index(0.5, 1), 0);
        assert_eq!(bin_index(1.0, 1), 0);
    }

    #[test]
    fn empty_input_yields_empty_stats() {
        let density = score_density(&[], 4).unwrap();
        assert_eq!(density.counts, vec![0, 0, 0, 0]);
        assert_eq!(density.n, 0);
        assert_eq!(density.mean, None);
        assert_eq!(density.median, None);
    }

    #[test]
    fn median_handles_even_and_odd_counts() {
        let odd = score_density(&[0.1, 0.9, 0.4], 10).unwrap();
        assert!((odd.median.unwrap() - 0.4).abs() < 1e-12);
        let even = score_density(&[0.1, 0.9, 0.4, 0.6], 10).unwrap();
        assert!((even.median.unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(matches!(score_density(&[0.5], 0), Err(DensityError::InvalidBins)));
        let err = score_density(&[0.2, 1.2], 10).unwrap_err();
        assert!(err.to_string().contains("index 1"), "{err}");
        assert!(score_density(&[-0.1], 10).is_err());
        assert!(score_density(&[f64::NAN], 10).is_err());
    }

    #[test]
    fn csv_lists_midpoints_fractions_and_sources() {
        let base = score_density(&[0.1, 0.9], 2).unwrap();
        let tuned = score_density(&[0.9], 2).unwrap();
        let csv = density_csv(&[("base", &base), ("tuned", &tuned)]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "x,y,source");
        assert_eq!(lines[1], "0.25,0.5,base");
        assert_eq!(lines[2], "0.75,0.5,base");
        assert_eq!(lines[3], "0.25,0,tuned");
        assert_eq!(lines[4], "0.75,1,tuned");
        assert_eq!(lines.len(), 5);
    }

    /// Property: every valid score lands in exactly one in-range bin, and
    /// the rule is monotone in the score.
    #[test]
    fn random_scores_bin_consistently() {
        let mut rng = StdRng::seed_from_u64(0xd00d);
        for _ in 0..1000 {
            let bins = rng.random_range(1..=20);
            let a: f64 = rng.random_range(0.0..=1.0);
            let b: f64 = rng.random_range(0.0..=1.0);
            let (low, high) = if a <= b { (a, b) } else { (b, a) };
            let bin_low = bin_index(low, bins);
            let bin_high = bin_index(high, bins);
            assert!(bin_low < bins && bin_high < bins);
            assert!(bin_low <= bin_high, "binning must be monotone");
        }
        let scores: Vec<f64> = (0..500).map(|_| rng.random_range(0.0..=1.0)).collect();
        let density = score_density(&scores, 7).unwrap();
        assert_eq!(density.counts.iter().sum::<u64>(), 500);
    }
}
