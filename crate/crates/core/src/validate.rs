//! Structural validation of criteria and rubrics.
//!
//! Validation never rewrites anything: it reports. Errors mark a rubric
//! unusable for the requesting stage; warnings flag style drift worth a
//! repair pass but safe to grade with. Every error produced under the
//! lenient strictness is also an error under strict, so tightening a profile
//! never accepts something it previously rejected.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::criterion::{Criterion, CriterionKind};
use crate::rubric::{Rubric, RubricStage};

/// Which weight signs a stage admits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    /// Reward-style rubrics: every weight must be positive.
    PositiveOnly,
    /// Pitfall-style rubrics: every weight must be negative.
    PenaltyOnly,
    /// Reward and pitfall criteria side by side.
    Mixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strictness {
    Strict,
    Lenient,
}

/// Numeric bounds enforced by validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct Bounds {
    /// Minimum criteria per candidate/base rubric.
    pub min_criteria: usize,
    /// Maximum criteria per candidate/base rubric.
    pub max_criteria: usize,
    pub min_weight: i32,
    pub max_weight: i32,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            min_criteria: 3,
            max_criteria: 25,
            min_weight: -10,
            max_weight: 10,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ValidationProfile {
    pub polarity: Polarity,
    pub strictness: Strictness,
    pub bounds: Bounds,
}

impl Default for ValidationProfile {
    fn default() -> Self {
        ValidationProfile::strict(Polarity::PositiveOnly)
    }
}

impl ValidationProfile {
    pub fn strict(polarity: Polarity) -> Self {
        ValidationProfile {
            polarity,
            strictness: Strictness::Strict,
            bounds: Bounds::default(),
        }
    }

    pub fn lenient(polarity: Polarity) -> Self {
        ValidationProfile {
            polarity,
            strictness: Strictness::Lenient,
            bounds: Bounds::default(),
        }
    }

    fn is_strict(&self) -> bool {
        self.strictness == Strictness::Strict
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ValidationCode {
    WeightOutOfRange,
    WeightOutOfProfile,
    WeightZero,
    TitleLength,
    DescriptionLength,
    CriteriaCount,
    DuplicateId,
    SmaxNotPositive,
    CheckerIdMissing,
    LangConsistencyUnchecked,
}

impl fmt::Display for ValidationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ValidationCode::WeightOutOfRange => "WEIGHT_OUT_OF_RANGE",
            ValidationCode::WeightOutOfProfile => "WEIGHT_OUT_OF_PROFILE",
            ValidationCode::WeightZero => "WEIGHT_ZERO",
            ValidationCode::TitleLength => "TITLE_LENGTH",
            ValidationCode::DescriptionLength => "DESCRIPTION_LENGTH",
            ValidationCode::CriteriaCount => "CRITERIA_COUNT",
            ValidationCode::DuplicateId => "DUPLICATE_ID",
            ValidationCode::SmaxNotPositive => "SMAX_NOT_POSITIVE",
            ValidationCode::CheckerIdMissing => "CHECKER_ID_MISSING",
            ValidationCode::LangConsistencyUnchecked => "LANG_CONSISTENCY_UNCHECKED",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationIssue {
    pub code: ValidationCode,
    /// Id of the offending criterion; `None` for rubric-level issues.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion_id: Option<String>,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub errors: Vec<ValidationIssue>,
    pub warnings: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn push_error(&mut self, code: ValidationCode, criterion_id: Option<&str>, message: impl Into<String>) {
        self.errors.push(ValidationIssue {
            code,
            criterion_id: criterion_id.map(str::to_string),
            message: message.into(),
        });
    }

    pub fn push_warning(&mut self, code: ValidationCode, criterion_id: Option<&str>, message: impl Into<String>) {
        self.warnings.push(ValidationIssue {
            code,
            criterion_id: criterion_id.map(str::to_string),
            message: message.into(),
        });
    }

    pub fn absorb(&mut self, other: ValidationReport) {
        self.errors.extend(other.errors);
        self.warnings.extend(other.warnings);
    }

    /// One-line `CODE: message` summaries of the errors, used in repair
    /// prompts and logs.
    pub fn error_lines(&self) -> Vec<String> {
        self.errors
            .iter()
            .map(|i| format!("{}: {}", i.code, i.message))
            .collect()
    }
}

fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Checks one criterion against a profile: weight range and sign, title and
/// description length, and checker wiring.
pub fn validate_criterion(c: &Criterion, profile: &ValidationProfile) -> ValidationReport {
    let mut report = ValidationReport::default();
    let id = Some(c.id.as_str());
    let b = &profile.bounds;

    if c.weight < b.min_weight || c.weight > b.max_weight {
        report.push_error(
            ValidationCode::WeightOutOfRange,
            id,
            format!(
                "weight {} outside [{}, {}]",
                c.weight, b.min_weight, b.max_weight
            ),
        );
    }
    match profile.polarity {
        Polarity::PositiveOnly => {
            if c.weight < 0 {
                report.push_error(
                    ValidationCode::WeightOutOfProfile,
                    id,
                    format!("weight {} is negative under a positive-only profile", c.weight),
                );
            } else if c.weight == 0 {
                report.push_warning(
                    ValidationCode::WeightZero,
                    id,
                    "weight 0 contributes nothing to the score",
                );
            }
        }
        Polarity::PenaltyOnly => {
            if c.weight >= 0 {
                report.push_error(
                    ValidationCode::WeightOutOfProfile,
                    id,
                    format!(
                        "weight {} is not negative under a penalty-only profile",
                        c.weight
                    ),
                );
            }
        }
        Polarity::Mixed => {
            if c.weight == 0 {
                report.push_warning(
                    ValidationCode::WeightZero,
                    id,
                    "weight 0 contributes nothing to the score",
                );
            }
        }
    }

    let title_words = word_count(&c.title);
    if !(2..=5).contains(&title_words) {
        let message = format!("title has {title_words} word(s), expected 2-5");
        if profile.is_strict() {
            report.push_error(ValidationCode::TitleLength, id, message);
        } else {
            report.push_warning(ValidationCode::TitleLength, id, message);
        }
    }

    if profile.is_strict() {
        let description_words = word_count(&c.description);
        if description_words > 40 {
            report.push_warning(
                ValidationCode::DescriptionLength,
                id,
                format!("description has {description_words} words, expected at most 40"),
            );
        }
    }

    if let CriterionKind::Verifiable { checker_id, .. } = &c.kind {
        if checker_id.is_empty() {
            report.push_error(
                ValidationCode::CheckerIdMissing,
                id,
                "verifiable criterion has an empty checker_id",
            );
        }
    }

    report
}

/// Checks a whole rubric: every criterion, id uniqueness, stage-appropriate
/// criterion-count bounds, and a positive score ceiling.
pub fn validate_rubric(rubric: &Rubric, profile: &ValidationProfile) -> ValidationReport {
    let mut report = ValidationReport::default();
    for c in &rubric.criteria {
        report.absorb(validate_criterion(c, profile));
    }

    let mut seen = std::collections::BTreeSet::new();
    let mut reported = std::collections::BTreeSet::new();
    for c in &rubric.criteria {
        if !seen.insert(c.id.as_str()) && reported.insert(c.id.as_str()) {
            report.push_error(
                ValidationCode::DuplicateId,
                Some(&c.id),
                format!("criterion id `{}` appears more than once", c.id),
            );
        }
    }

    // Count bounds apply while rubrics are still being synthesized; the final
    // merge may legitimately exceed the cap.
    if matches!(rubric.stage, RubricStage::Candidate | RubricStage::Base) {
        let n = rubric.criteria.len();
        let b = &profile.bounds;
        if n < b.min_criteria || n > b.max_criteria {
            let message = format!(
                "rubric has {n} criteria, expected {}-{} at the {:?} stage",
                b.min_criteria, b.max_criteria, rubric.stage
            );
            if profile.is_strict() {
                report.push_error(ValidationCode::CriteriaCount, None, message);
            } else {
                report.push_warning(ValidationCode::CriteriaCount, None, message);
            }
        }
    }

    // A usable reward rubric needs a positive ceiling to normalize against.
    // Penalty-only rubrics have none by construction; they are merged into
    // mixed sets before any normalized scoring happens.
    if profile.polarity != Polarity::PenaltyOnly && rubric.s_max() <= 0 {
        report.push_error(
            ValidationCode::SmaxNotPositive,
            None,
            format!(
                "sum of positive weights is {}, normalized scoring needs it > 0",
                rubric.s_max()
            ),
        );
    }

    if profile.is_strict() {
        report.push_warning(
            ValidationCode::LangConsistencyUnchecked,
            None,
            "criterion language vs. query language is not machine-checked; review multilingual rubrics manually",
        );
    }

    report
}
