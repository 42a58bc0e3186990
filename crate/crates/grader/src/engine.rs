//! The grading engine: evaluates a response against a rubric by running rule
//! checkers locally and fanning semantic criteria out to a judge model, then
//! folds the judgments into a weight-normalized score.

use std::sync::Arc;

use futures::StreamExt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use rubricforge_core::{Criterion, CriterionKind, Rubric};
use rubricforge_gateway::{
    bindings, builtin, ChatMessage, Gateway, GatewayError, LlmRequest, RenderError, TemplateName,
};

use crate::checkers::{check_verifiable, CheckerRegistry, CheckerSpec};
use crate::conversation::Conversation;
use crate::judgment::{parse_judgment, Judgment, JudgmentSource};
use crate::score::{score, ScoreError, ScoreReport};

/// What to do when a single criterion cannot be judged (backend failure,
/// unparseable judge reply, checker misconfiguration).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailurePolicy {
    /// Score the criterion as unmet, record the error on the judgment, and
    /// keep grading. The default: one flaky judgment should not sink a batch.
    #[default]
    ZeroAndFlag,
    /// Fail the whole grading call on the first error.
    Abort,
}

fn default_temperature() -> f64 {
    0.0
}
fn default_max_tokens() -> u32 {
    1024
}
fn default_concurrency() -> usize {
    8
}
fn default_parse_attempts() -> u32 {
    2
}

/// Judge-model settings for semantic criteria.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GraderConfig {
    /// Gateway backend the judge requests are routed to.
    pub backend_id: String,
    /// Judge model name.
    pub model: String,
    #[serde(default = "default_temperature")]
    pub temperature: f64,
    #[serde(default = "default_max_tokens")]
    pub max_tokens: u32,
    /// Maximum semantic judgments in flight per grading call.
    #[serde(default = "default_concurrency")]
    pub concurrency: usize,
    /// Total tries per criterion when the judge reply does not parse.
    #[serde(default = "default_parse_attempts")]
    pub parse_attempts: u32,
    #[serde(default)]
    pub failure_policy: FailurePolicy,
}

impl GraderConfig {
    pub fn new(backend_id: impl Into<String>, model: impl Into<String>) -> Self {
        GraderConfig {
            backend_id: backend_id.into(),
            model: model.into(),
            temperature: default_temperature(),
            max_tokens: default_max_tokens(),
            concurrency: default_concurrency(),
            parse_attempts: default_parse_attempts(),
            failure_policy: FailurePolicy::default(),
        }
    }
}

#[derive(Debug, Error)]
pub enum GradeError {
    #[error("BACKEND: {0}")]
    Backend(#[from] GatewayError),
    #[error(
        "JUDGMENT_PARSE_ERROR: criterion `{criterion_id}` reply unparseable after {attempts} attempt(s): {detail}"
    )]
    JudgmentParse {
        criterion_id: String,
        attempts: u32,
        detail: String,
    },
    #[error("CONVERSATION_SHAPE: {detail}")]
    ConversationShape { detail: String },
    #[error("CRITERION: `{criterion_id}`: {detail}")]
    Criterion { criterion_id: String, detail: String },
    #[error("TEMPLATE: {0}")]
    Template(#[from] RenderError),
    #[error(transparent)]
    Score(#[from] ScoreError),
}

/// Renders one criterion the way the judge prompt expects it:
/// `"{description} (Points: {weight})"`.
pub fn render_rubric_item(criterion: &Criterion) -> String {
    format!("{} (Points: {})", criterion.description, criterion.weight)
}

/// Grades responses against rubrics: rule checkers run in-process, semantic
/// criteria go to the configured judge model through the gateway.
pub struct Grader {
    gateway: Arc<Gateway>,
    registry: CheckerRegistry,
    config: GraderConfig,
}

impl Grader {
    /// A grader with the standard checker registry.
    pub fn new(gateway: Arc<Gateway>, config: GraderConfig) -> Self {
        Grader {
            gateway,
            registry: CheckerRegistry::standard(),
            config,
        }
    }

    pub fn with_registry(gateway: Arc<Gateway>, config: GraderConfig, registry: CheckerRegistry) -> Self {
        Grader {
            gateway,
            registry,
            config,
        }
    }

    pub fn config(&self) -> &GraderConfig {
        &self.config
    }

    pub fn registry(&self) -> &CheckerRegistry {
        &self.registry
    }

    pub fn gateway(&self) -> &Arc<Gateway> {
        &self.gateway
    }

    /// Grades one response against a rubric.
    ///
    /// The conversation must end with the assistant turn under evaluation.
    /// Verifiable criteria are checked against that final turn; semantic
    /// criteria are judged over the rendered conversation, at most
    /// `concurrency` in flight. Judgments come back in rubric order
    /// regardless of completion order.
    pub async fn grade_response(
        &self,
        rubric: &Rubric,
        conversation: &Conversation,
    ) -> Result<ScoreReport, GradeError> {
        if !conversation.ends_with_assistant() {
            return Err(GradeError::ConversationShape {
                detail: "conversation must end with an assistant turn to grade".to_string(),
            });
        }
        let response_text = conversation.last_assistant().unwrap_or("");
        let conversation_text = conversation.render_text();

        let mut slots: Vec<Option<Judgment>> = Vec::with_capacity(rubric.criteria.len());
        slots.resize_with(rubric.criteria.len(), || None);
        let mut semantic: Vec<(usize, &Criterion)> = Vec::new();

        for (index, criterion) in rubric.criteria.iter().enumerate() {
            match &criterion.kind {
                CriterionKind::Verifiable { .. } => {
                    let spec = CheckerSpec::from_criterion(criterion)
                        .expect("verifiable criterion carries a checker spec");
                    match check_verifiable(&self.registry, &spec, response_text) {
                        Ok(mut judgment) => {
                            judgment.criterion_id = criterion.id.clone();
                            slots[index] = Some(judgment);
                        }
                        Err(err) => {
                            let wrapped = GradeError::Criterion {
                                criterion_id: criterion.id.clone(),
                                detail: err.to_string(),
                            };
                            slots[index] = Some(self.flag_or_abort(criterion, wrapped)?);
                        }
                    }
                }
                CriterionKind::Semantic => semantic.push((index, criterion)),
            }
        }

        // Boxing keeps the stream's item type concrete, so callers can hold
        // this future across higher-ranked trait bounds (e.g. HTTP handlers).
        type SemanticOutcome<'a> = (usize, &'a Criterion, Result<Judgment, GradeError>);
        let judging: Vec<futures::future::BoxFuture<'_, SemanticOutcome<'_>>> = semantic
            .into_iter()
            .map(|(index, criterion)| {
                let conversation_text = conversation_text.as_str();
                let judge = async move {
                    let result = self.grade_semantic(conversation_text, criterion).await;
                    (index, criterion, result)
                };
                Box::pin(judge) as futures::future::BoxFuture<'_, SemanticOutcome<'_>>
            })
            .collect();
        let mut pending =
            futures::stream::iter(judging).buffer_unordered(self.config.concurrency.max(1));

        while let Some((index, criterion, result)) = pending.next().await {
            match result {
                Ok(judgment) => slots[index] = Some(judgment),
                Err(err) => slots[index] = Some(self.flag_or_abort(criterion, err)?),
            }
        }
        drop(pending);

        let judgments: Vec<Judgment> = slots
            .into_iter()
            .map(|slot| slot.expect("every criterion received a judgment"))
            .collect();
        Ok(score(rubric, judgments)?)
    }

    /// Judges one semantic criterion. Unparseable replies are retried with a
    /// salted seed tag (so caching cannot replay the bad reply) up to
    /// `parse_attempts` total tries.
    pub async fn grade_semantic(
        &self,
        conversation_text: &str,
        criterion: &Criterion,
    ) -> Result<Judgment, GradeError> {
        let template = builtin(TemplateName::Grader);
        let rubric_item = render_rubric_item(criterion);
        let prompt = template.render_strict(&bindings([
            ("conversation", conversation_text),
            ("rubric_item", rubric_item.as_str()),
        ]))?;

        let attempts = self.config.parse_attempts.max(1);
        let mut last_parse_failure = String::new();
        for attempt in 0..attempts {
            let seed_tag = if attempt == 0 {
                format!("judge:{}", criterion.id)
            } else {
                format!("judge:{}:retry{attempt}", criterion.id)
            };
            let request = LlmRequest::new(&self.config.model, vec![ChatMessage::user(&prompt)])
                .with_temperature(self.config.temperature)
                .with_max_tokens(self.config.max_tokens)
                .with_seed_tag(seed_tag);
            let response = self.gateway.complete(&self.config.backend_id, &request).await?;
            match parse_judgment(&response.text) {
                Ok(payload) => {
                    return Ok(Judgment {
                        criterion_id: criterion.id.clone(),
                        criteria_met: payload.criteria_met,
                        explanation: payload.explanation,
                        grader_id: format!("llm:{}", self.config.model),
                        source: JudgmentSource::Llm,
                        error: None,
                    });
                }
                Err(err) => last_parse_failure = err.to_string(),
            }
        }
        Err(GradeError::JudgmentParse {
            criterion_id: criterion.id.clone(),
            attempts,
            detail: last_parse_failure,
        })
    }

    fn flag_or_abort(&self, criterion: &Criterion, err: GradeError) -> Result<Judgment, GradeError> {
        match self.config.failure_policy {
            FailurePolicy::Abort => Err(err),
            FailurePolicy::ZeroAndFlag => {
                tracing::warn!(
                    criterion_id = %criterion.id,
                    error = %err,
                    "grading failed; scoring criterion as unmet"
                );
                let (grader_id, source) = match &criterion.kind {
                    CriterionKind::Verifiable { checker_id, .. } => {
                        (format!("rule:{checker_id}"), JudgmentSource::Rule)
                    }
                    CriterionKind::Semantic => {
                        (format!("llm:{}", self.config.model), JudgmentSource::Llm)
                    }
                };
                Ok(Judgment {
                    criterion_id: criterion.id.clone(),
                    criteria_met: false,
                    explanation: "grading failed; criterion treated as unmet".to_string(),
                    grader_id,
                    source,
                    error: Some(err.to_string()),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rubricforge_gateway::{BackendOptions, MockBackend};
    use rubricforge_core::RubricStage;
    use std::collections::BTreeMap;

    fn judge_reply(explanation: &str, met: bool) -> String {
        serde_json::json!({"explanation": explanation, "criteria_met": met}).to_string()
    }

    fn gateway_with(mock: Arc<MockBackend>) -> Arc<Gateway> {
        let mut gateway = Gateway::new();
        gateway.register(mock, BackendOptions::default());
        Arc::new(gateway)
    }

    fn phrase_params(phrase: &str) -> BTreeMap<String, serde_json::Value> {
        BTreeMap::from([("phrase".to_string(), serde_json::Value::String(phrase.to_string()))])
    }

    fn mixed_rubric() -> Rubric {
        Rubric {
            query_id: "q-engine".to_string(),
            stage: RubricStage::Final,
            criteria: vec![
                Criterion::verifiable(
                    "v1",
                    "Mentions hydration",
                    "States that the patient should stay hydrated.",
                    5,
                    "content:exact_phrase",
                    phrase_params("hydration"),
                ),
                Criterion::semantic(
                    "s1",
                    "Tone stays calm",
                    "Keeps a calm, reassuring tone throughout the reply.",
                    10,
                ),
                Criterion::verifiable(
                    "v2",
                    "Avoids commas",
                    "Uses no comma anywhere in the response.",
                    3,
                    "punctuation:no_comma",
                    BTreeMap::new(),
                ),
                Criterion::semantic(
                    "s2",
                    "Cites a guideline",
                    "References at least one published clinical guideline.",
                    2,
                ),
            ],
        }
    }

    #[tokio::test]
    async fn grades_mixed_rubric_in_rubric_order() {
        let script = serde_json::json!({
            "rules": [
                {"match": {"seed_tag": "judge:s1"},
                 "replies": [judge_reply("calm and reassuring", true)], "repeat_last": true},
                {"match": {"seed_tag": "judge:s2"},
                 "replies": [judge_reply("no guideline cited", false)], "repeat_last": true},
            ]
        });
        let mock = Arc::new(MockBackend::from_script_json("judge", &script.to_string()).unwrap());
        let grader = Grader::new(gateway_with(mock.clone()), GraderConfig::new("judge", "judge-model"));

        let conversation = Conversation::from_prompt_response(
            "How should I handle mild dehydration at home?",
            "Focus on steady hydration, with small sips of oral rehydration solution.",
        );
        let report = grader.grade_response(&mixed_rubric(), &conversation).await.unwrap();

        // v1 met (phrase present), s1 met, v2 unmet (response has a comma), s2 unmet.
        assert_eq!(report.raw, 15.0);
        assert_eq!(report.s_max, 20.0);
        assert!((report.normalized - 0.75).abs() < 1e-12);

        let ids: Vec<&str> = report.judgments.iter().map(|j| j.criterion_id.as_str()).collect();
        assert_eq!(ids, ["v1", "s1", "v2", "s2"]);
        assert_eq!(report.judgments[0].source, JudgmentSource::Rule);
        assert_eq!(report.judgments[0].grader_id, "rule:content:exact_phrase");
        assert_eq!(report.judgments[1].source, JudgmentSource::Llm);
        assert_eq!(report.judgments[1].grader_id, "llm:judge-model");
        assert!(!report.judgments[2].criteria_met);

        // Exactly the two semantic criteria reached the judge.
        let mut tags: Vec<String> =
            mock.calls().into_iter().filter_map(|call| call.seed_tag).collect();
        tags.sort();
        assert_eq!(tags, ["judge:s1", "judge:s2"]);
    }

    #[tokio::test]
    async fn judge_prompt_embeds_conversation_and_rubric_item() {
        let mock = Arc::new(MockBackend::fixed("judge", judge_reply("ok", true)));
        let grader = Grader::new(gateway_with(mock.clone()), GraderConfig::new("judge", "judge-model"));
        let criterion = Criterion::semantic("s1", "Calm tone", "Keeps a calm tone.", 4);
        let conversation = Conversation::from_prompt_response("Hello?", "Hi there.");

        grader
            .grade_semantic(&conversation.render_text(), &criterion)
            .await
            .unwrap();

        let calls = mock.calls();
        assert_eq!(calls.len(), 1);
        let prompt = &calls[0].messages[0].content;
        assert!(prompt.contains("user: Hello?\n\nassistant: Hi there."), "{prompt}");
        assert!(prompt.contains("Keeps a calm tone. (Points: 4)"), "{prompt}");
        assert!(!prompt.contains("<<"), "unrendered slot left in prompt: {prompt}");
        assert_eq!(calls[0].temperature, 0.0);
        assert_eq!(calls[0].max_tokens, 1024);
    }

    #[tokio::test]
    async fn unparseable_reply_is_retried_with_salted_seed_tag() {
        let script = serde_json::json!({
            "rules": [
                {"match": {"seed_tag": "judge:s1"},
                 "replies": ["not json at all", judge_reply("second try parsed", true)]},
            ]
        });
        let mock = Arc::new(MockBackend::from_script_json("judge", &script.to_string()).unwrap());
        let grader = Grader::new(gateway_with(mock.clone()), GraderConfig::new("judge", "judge-model"));
        let criterion = Criterion::semantic("s1", "Calm tone", "Keeps a calm tone.", 4);

        let judgment = grader.grade_semantic("user: hi\n\nassistant: hello", &criterion).await.unwrap();
        assert!(judgment.criteria_met);
        assert_eq!(judgment.explanation, "second try parsed");

        let tags: Vec<String> = mock.calls().into_iter().filter_map(|call| call.seed_tag).collect();
        assert_eq!(tags, ["judge:s1", "judge:s1:retry1"]);
    }

    #[tokio::test]
    async fn parse_failure_exhausts_attempts_then_respects_policy() {
        let rubric = Rubric {
            query_id: "q-parse".to_string(),
            stage: RubricStage::Final,
            criteria: vec![
                Criterion::semantic("s1", "Calm tone", "Keeps a calm tone.", 4),
                Criterion::semantic("s2", "Names a source", "Names one concrete source.", 6),
            ],
        };
        let script = serde_json::json!({
            "rules": [
                {"match": {"seed_tag": "judge:s1"},
                 "replies": ["garbage"], "repeat_last": true},
                {"match": {"seed_tag": "judge:s2"},
                 "replies": [judge_reply("source named", true)], "repeat_last": true},
            ]
        });
        let conversation = Conversation::from_prompt_response("q", "a");

        // Default policy: flagged, scored as unmet, grading continues.
        let mock = Arc::new(MockBackend::from_script_json("judge", &script.to_string()).unwrap());
        let grader = Grader::new(gateway_with(mock.clone()), GraderConfig::new("judge", "judge-model"));
        let report = grader.grade_response(&rubric, &conversation).await.unwrap();
        assert!(!report.judgments[0].criteria_met);
        let flag = report.judgments[0].error.as_deref().unwrap();
        assert!(flag.contains("JUDGMENT_PARSE_ERROR"), "{flag}");
        assert!(report.judgments[1].criteria_met);
        assert_eq!(report.raw, 6.0);
        // Two tries for s1 (parse_attempts), one for s2.
        assert_eq!(mock.call_count(), 3);

        // Abort policy: the error propagates.
        let mock = Arc::new(MockBackend::from_script_json("judge", &script.to_string()).unwrap());
        let mut config = GraderConfig::new("judge", "judge-model");
        config.failure_policy = FailurePolicy::Abort;
        let grader = Grader::new(gateway_with(mock), config);
        let err = grader.grade_response(&rubric, &conversation).await.unwrap_err();
        assert!(err.to_string().contains("JUDGMENT_PARSE_ERROR"), "{err}");
    }

    #[tokio::test]
    async fn backend_error_is_flagged_under_default_policy() {
        let script = serde_json::json!({
            "rules": [
                {"match": {"seed_tag": "judge:s1"},
                 "replies": [{"error": {"status": 400, "retryable": false, "message": "bad request"}}],
                 "repeat_last": true},
            ]
        });
        let rubric = Rubric {
            query_id: "q-backend".to_string(),
            stage: RubricStage::Final,
            criteria: vec![
                Criterion::semantic("s1", "Calm tone", "Keeps a calm tone.", 4),
                Criterion::verifiable(
                    "v1",
                    "No commas",
                    "Uses no comma anywhere.",
                    6,
                    "punctuation:no_comma",
                    BTreeMap::new(),
                ),
            ],
        };
        let mock = Arc::new(MockBackend::from_script_json("judge", &script.to_string()).unwrap());
        let grader = Grader::new(gateway_with(mock), GraderConfig::new("judge", "judge-model"));
        let conversation = Conversation::from_prompt_response("q", "clean reply without pause");

        let report = grader.grade_response(&rubric, &conversation).await.unwrap();
        assert!(!report.judgments[0].criteria_met);
        assert!(report.judgments[0].error.as_deref().unwrap().contains("BACKEND"));
        assert!(report.judgments[1].criteria_met);
        assert_eq!(report.normalized, 0.6);
    }

    #[tokio::test]
    async fn unknown_checker_is_flagged_or_aborts() {
        let rubric = Rubric {
            query_id: "q-checker".to_string(),
            stage: RubricStage::Final,
            criteria: vec![
                Criterion::verifiable(
                    "v1",
                    "Uses custom rule",
                    "Passes a checker that is not registered.",
                    5,
                    "letters:letter_counting9",
                    BTreeMap::new(),
                ),
                Criterion::verifiable(
                    "v2",
                    "No commas",
                    "Uses no comma anywhere.",
                    5,
                    "punctuation:no_comma",
                    BTreeMap::new(),
                ),
            ],
        };
        let conversation = Conversation::from_prompt_response("q", "no commas here");

        let mock = Arc::new(MockBackend::fixed("judge", judge_reply("unused", true)));
        let grader = Grader::new(gateway_with(mock.clone()), GraderConfig::new("judge", "judge-model"));
        let report = grader.grade_response(&rubric, &conversation).await.unwrap();
        assert!(!report.judgments[0].criteria_met);
        assert!(report.judgments[0].error.as_deref().unwrap().contains("UNKNOWN_CHECKER"));
        assert_eq!(report.normalized, 0.5);
        assert_eq!(mock.call_count(), 0, "rule-only rubric never calls the judge");

        let mut config = GraderConfig::new("judge", "judge-model");
        config.failure_policy = FailurePolicy::Abort;
        let grader = Grader::new(
            gateway_with(Arc::new(MockBackend::fixed("judge", "unused"))),
            config,
        );
        let err = grader.grade_response(&rubric, &conversation).await.unwrap_err();
        assert!(err.to_string().contains("UNKNOWN_CHECKER"), "{err}");
    }

    #[tokio::test]
    async fn conversation_must_end_with_assistant() {
        let grader = Grader::new(
            gateway_with(Arc::new(MockBackend::fixed("judge", "unused"))),
            GraderConfig::new("judge", "judge-model"),
        );
        let mut conversation = Conversation::from_prompt_response("q", "a");
        conversation.turns.pop();
        let err = grader
            .grade_response(&mixed_rubric(), &conversation)
            .await
            .unwrap_err();
        assert!(err.to_string().contains("CONVERSATION_SHAPE"), "{err}");
    }

    #[tokio::test]
    async fn many_semantic_criteria_all_complete_under_bounded_concurrency() {
        let mock = Arc::new(MockBackend::fixed("judge", judge_reply("met", true)));
        let mut config = GraderConfig::new("judge", "judge-model");
        config.concurrency = 3;
        let grader = Grader::new(gateway_with(mock.clone()), config);

        let criteria: Vec<Criterion> = (0..20)
            .map(|i| {
                Criterion::semantic(
                    format!("s{i}"),
                    "Covers the point",
                    format!("Covers discussion point number {i}."),
                    1,
                )
            })
            .collect();
        let rubric = Rubric {
            query_id: "q-fanout".to_string(),
            stage: RubricStage::Final,
            criteria,
        };
        let conversation = Conversation::from_prompt_response("q", "a");
        let report = grader.grade_response(&rubric, &conversation).await.unwrap();
        assert_eq!(report.normalized, 1.0);
        assert_eq!(mock.call_count(), 20);
        let ids: Vec<String> = report.judgments.iter().map(|j| j.criterion_id.clone()).collect();
        let expected: Vec<String> = (0..20).map(|i| format!("s{i}")).collect();
        assert_eq!(ids, expected, "judgments stay in rubric order");
    }

    #[test]
    fn config_defaults_fill_in_from_minimal_json() {
        let config: GraderConfig =
            serde_json::from_str(r#"{"backend_id": "judge", "model": "judge-model"}"#).unwrap();
        assert_eq!(config.temperature, 0.0);
        assert_eq!(config.max_tokens, 1024);
        assert_eq!(config.concurrency, 8);
        assert_eq!(config.parse_attempts, 2);
        assert_eq!(config.failure_policy, FailurePolicy::ZeroAndFlag);
        let policy: FailurePolicy = serde_json::from_str(r#""abort""#).unwrap();
        assert_eq!(policy, FailurePolicy::Abort);
    }
}
