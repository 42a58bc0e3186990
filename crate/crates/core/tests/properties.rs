//! Property tests for the wire form, merging, and validation monotonicity.

use proptest::prelude::*;
use rubricforge_core::{
    merge_rubrics, validate_rubric, Criterion, CriterionKind, Polarity, Provenance, Rubric,
    RubricStage, ValidationProfile,
};

fn arb_params() -> impl Strategy<Value = std::collections::BTreeMap<String, serde_json::Value>> {
    proptest::collection::btree_map(
        "[a-z_]{1,8}",
        prop_oneof![
            any::<i32>().prop_map(|n| serde_json::json!(n)),
            "[ -~]{0,12}".prop_map(|s| serde_json::json!(s)),
        ],
        0..3,
    )
}

fn arb_kind() -> impl Strategy<Value = CriterionKind> {
    prop_oneof![
        Just(CriterionKind::Semantic),
        ("[a-z_]{1,10}:[a-z0-9_]{1,10}", arb_params()).prop_map(|(checker_id, params)| {
            CriterionKind::Verifiable { checker_id, params }
        }),
    ]
}

fn arb_provenance() -> impl Strategy<Value = Provenance> {
    prop_oneof![
        Just(Provenance::Base),
        Just(Provenance::Evolved),
        Just(Provenance::Manual),
        "[a-zA-Z0-9_.-]{1,10}".prop_map(|source_model| Provenance::Candidate { source_model }),
    ]
}

prop_compose! {
    fn arb_criterion()(
        id in "[a-z0-9-]{1,12}",
        title in "[ -~]{0,30}",
        description in "\\PC{0,60}",
        weight in -12i32..=12,
        kind in arb_kind(),
        provenance in arb_provenance(),
    ) -> Criterion {
        Criterion { id, title, description, weight, kind, provenance }
    }
}

proptest! {
    #[test]
    fn criterion_wire_round_trip(c in arb_criterion()) {
        let json = serde_json::to_string(&c).unwrap();
        let back: Criterion = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, c);
    }

    #[test]
    fn merge_preserves_length_and_id_uniqueness(
        base_criteria in proptest::collection::vec(arb_criterion(), 0..8),
        add_criteria in proptest::collection::vec(arb_criterion(), 0..8),
    ) {
        // Deduplicate ids within each side first: merge's contract assumes
        // each input rubric is internally valid.
        let dedup = |criteria: Vec<Criterion>| {
            let mut seen = std::collections::BTreeSet::new();
            criteria
                .into_iter()
                .filter(|c| seen.insert(c.id.clone()))
                .collect::<Vec<_>>()
        };
        let base = Rubric::new("q", RubricStage::Base, dedup(base_criteria));
        let add = Rubric::new("q", RubricStage::Candidate, dedup(add_criteria));
        let merged = merge_rubrics(&base, &add).unwrap();

        prop_assert_eq!(merged.criteria.len(), base.criteria.len() + add.criteria.len());
        prop_assert_eq!(merged.stage, RubricStage::Final);
        // Base criteria come through verbatim and first.
        prop_assert_eq!(&merged.criteria[..base.criteria.len()], &base.criteria[..]);
        let ids: std::collections::BTreeSet<&str> =
            merged.criteria.iter().map(|c| c.id.as_str()).collect();
        prop_assert_eq!(ids.len(), merged.criteria.len());
    }

    #[test]
    fn lenient_errors_never_exceed_strict_errors(
        criteria in proptest::collection::vec(arb_criterion(), 0..10),
        polarity_pick in 0u8..3,
        stage_pick in 0u8..3,
    ) {
        let polarity = [Polarity::PositiveOnly, Polarity::PenaltyOnly, Polarity::Mixed][polarity_pick as usize];
        let stage = [RubricStage::Candidate, RubricStage::Base, RubricStage::Final][stage_pick as usize];
        let rubric = Rubric::new("q", stage, criteria);
        let strict = validate_rubric(&rubric, &ValidationProfile::strict(polarity));
        let lenient = validate_rubric(&rubric, &ValidationProfile::lenient(polarity));
        prop_assert!(lenient.errors.len() <= strict.errors.len());
        for issue in &lenient.errors {
            prop_assert!(
                strict
                    .errors
                    .iter()
                    .any(|s| s.code == issue.code && s.criterion_id == issue.criterion_id),
                "lenient error {:?} absent under strict",
                issue
            );
        }
    }
}
