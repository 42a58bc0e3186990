//! Inter-rater agreement for binary judgments: Cohen's kappa plus
//! precision/recall/F1 with the first rater as reference.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// One item labeled by two raters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelPair {
    pub a: bool,
    pub b: bool,
}

impl LabelPair {
    pub fn new(a: bool, b: bool) -> Self {
        LabelPair { a, b }
    }
}

/// 2x2 confusion counts. Rater `a` indexes the first letter, rater `b` the
/// second: `tf` counts items where a said true and b said false.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tt: u64,
    pub tf: u64,
    pub ft: u64,
    pub ff: u64,
}

impl Confusion {
    pub fn from_pairs(pairs: impl IntoIterator<Item = LabelPair>) -> Self {
        let mut confusion = Confusion::default();
        for pair in pairs {
            match (pair.a, pair.b) {
                (true, true) => confusion.tt += 1,
                (true, false) => confusion.tf += 1,
                (false, true) => confusion.ft += 1,
                (false, false) => confusion.ff += 1,
            }
        }
        confusion
    }

    pub fn n(&self) -> u64 {
        self.tt + self.tf + self.ft + self.ff
    }
}

/// Agreement between two raters over the same items.
///
/// F1 treats rater `a` as the reference and `true` as the positive class;
/// zero denominators yield 0.0 (never NaN).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: u64,
    pub confusion: Confusion,
    /// Fraction of items both raters labeled identically.
    pub observed_agreement: f64,
    /// Chance agreement from the product of the raters' marginals.
    pub expected_agreement: f64,
    pub kappa: f64,
    /// True when chance agreement is exactly 1 and kappa's usual form is
    /// undefined; `kappa` then falls back to 1.0 on perfect agreement and
    /// 0.0 otherwise.
    pub kappa_degenerate: bool,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Error)]
pub enum AgreementError {
    #[error("EMPTY_INPUT: agreement needs at least one label pair")]
    EmptyInput,
}

fn ratio(numerator: u64, denominator: u64) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}

/// Computes Cohen's kappa and reference-based F1 from confusion counts.
pub fn agreement_report(confusion: Confusion) -> Result<AgreementReport, AgreementError> {
    let n = confusion.n();
    if n == 0 {
        return Err(AgreementError::EmptyInput);
    }
    let Confusion { tt, tf, ft, ff } = confusion;
    let n_f = n as f64;
    let observed = (tt + ff) as f64 / n_f;

    let a_true = tt + tf;
    let b_true = tt + ft;
    let a_false = ft + ff;
    let b_false = tf + ff;
    let expected = (a_true as f64 / n_f) * (b_true as f64 / n_f)
        + (a_false as f64 / n_f) * (b_false as f64 / n_f);

    // Exact degeneracy check in integers, immune to float rounding:
    // p_e == 1  <=>  a_true*b_true + a_false*b_false == n^2.
    let expected_exact_one = u128::from(a_true) * u128::from(b_true)
        + u128::from(a_false) * u128::from(b_false)
        == u128::from(n) * u128::from(n);
    let (kappa, kappa_degenerate) = if expected_exact_one {
        let perfect = tf == 0 && ft == 0;
        (if perfect { 1.0 } else { 0.0 }, true)
    } else {
        ((observed - expected) / (1.0 - expected), false)
    };

    let precision = ratio(tt, tt + ft);
    let recall = ratio(tt, tt + tf);
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };

    Ok(AgreementReport {
        n,
        confusion,
        observed_agreement: observed,
        expected_agreement: expected,
        kappa,
        kappa_degenerate,
        precision,
        recall,
        f1,
    })
}

/// Convenience for pair slices; see [`agreement_report`].
pub fn agreement_from_pairs(pairs: &[LabelPair]) -> Result<AgreementReport, AgreementError> {
    agreement_report(Confusion::from_pairs(pairs.iter().copied()))
}
