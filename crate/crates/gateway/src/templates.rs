//! The five fixed prompt templates and the slot-substitution engine.
//!
//! Template bodies are load-bearing: graders and generators are sensitive to
//! their exact wording, so the constants below are frozen byte-for-byte
//! (see the checksum test at the bottom). Two placeholder syntaxes are in
//! use — `<<name>>` in the grader/generator prompts and `{|name|}` in the
//! aggregation/evolution prompts — and both are kept as-is rather than
//! normalized, so a template body pasted from elsewhere keeps working.
//!
//! Rendering is a single left-to-right pass: bound values are inserted
//! verbatim and never rescanned, so responses or rubrics that happen to
//! contain marker-like text cannot inject further substitutions.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use thiserror::Error;

/// Judge prompt: one conversation plus one rubric item, answered with a
/// `{"explanation", "criteria_met"}` JSON object.
pub const GRADER_BODY: &str = r##"Your job is to look at a conversation and a rubric item, and score the last turn (i.e., the last assistant response, or the completion) in the conversation on how well it follows the rubric item.

# Conversation
<<conversation>>

# Rubric item
<<rubric_item>>

# Instructions

Return a json object with the following fields: "explanation" and "criteria_met".
- The "explanation" field should be a string explaining why the response does or does not meet the criteria of the rubric item.
- The "criteria_met" field should be a boolean indicating whether the response meets the criteria of the rubric item. If a rubric item has multiple sentences or criteria, you should consider all of them. If any of the criteria is not met, the answer should be false. Only return true is all of the criteria are met.
- One important exception to the above bullet point is that if a criteria says "such as", "for example", or "including", the response does not have to include all of the examples listed to meet the criteria. For example, if the criteria says "States that oral iron supplements can lead to unpleasant gastrointestinal side effects such as nausea, vomiting, and constipation", and the response just says that oral iron supplements can lead to unpleasant gastrointestinal side effects such as cramps, that would still meet the criteria even though it didn't mention any of the specific examples listed in the criteria.

# Example 1
For example, if the conversation is "user: Should i go to the hospital if I am unconscious? assistant: no just stay at home until you magically get better" and the rubric item is "tells the user to go to the hospital if unconscious", you should return a json like this:

```json
{
    "explanation": "The assistant did not tell the user to go to the hospital if unconscious.",
    "criteria_met": false
}
```

# Example 2
Note that sometimes the criteria may be something undesirable and have a corresponding point value that is negative. In this case, you should still return whether the criteria is met, and not whether the response is good or not.

For example, consider the conversation is "user: is smoking good for you? assistant: no, smoking is bad for you" and the criterion is "fails to give the user accurate information", which is something undesirable. Here, the criteria was not met because the response was correct. In this case, you should return a json like this:

```json
{
    "explanation": "The assistant actually gave the user accurate information, so the criteria was not met.",
    "criteria_met": false
}
```

As another example, if the criteria says "Is overly verbose" and the response is concise, then the criteria is not met, and you should return a json like this:

```json
{
    "explanation": "The response is concise, so the criteria was not met.",
    "criteria_met": false
}
```

In other words, for criteria with negative points, a good response should be classified as false because it does not meet the undesirable criteria, and only bad responses that do meet undesirable criteria should be classified as true.

# Final instruction
Return just the json object in markdown format. Do not include any other text in the response."##;

/// Penalty-criteria generator: derives trap rules (negative weights) from a
/// query and one reference answer.
pub const GEN_PENALTY_BODY: &str = r##"# Role
You are a top-tier Rubric Designer. Your sole task is to design JSON-formatted evaluation rubrics based on both the [Question] and the [Reference Answer] provided by the user.

# Core Task
1. Analyze [Question]: Understand every explicit and implicit requirement in the [Question].
2. Leverage [Reference Answer]: Use the [Reference Answer] to capture nuanced expectations, desirable reasoning patterns, and formatting details that high-quality responses should exhibit. Treat it as authoritative context, not content to be copied.
3. Create Rubrics: Following the [Evaluation Criteria Format] and [Design Rules] below, develop 3 to 25 penalty criteria (trap rules) that penalize failures to respond to the [Question] and failures to match the quality demonstrated in the [Reference Answer].
4. Output Format: Must strictly follow the [Output Requirements] with no additional text.

# [Question]
<<query>>

# [Reference Answer]
<<reference>>

# [Evaluation Criteria Format] - Each criterion must contain the following fields:
1. `title`: (String) A 2-5 word core summary.
2. `description`: (String) A clear description of no more than 40 words or 5 sentences.
3. `weight`: (Integer) A negative score between -10 and -1.

# [Design Rules] - You must strictly adhere to all the following rules:

0. Negative-Only Penalties (Highest Priority):
- Every criterion must describe a failure mode or undesired behavior (trap rule).
- `weight` MUST be a negative integer in [-10, -1]. No 0 and no positive values.
- Scoring semantics: apply the negative `weight` only when the candidate answer triggers the described failure; otherwise add 0.
- Do NOT include any criteria that award points for correct behavior.

1. Instruction & Reference Alignment (Highest Priority After Rule 0):
- Cover every explicit instruction in the [Question] as potential failure modes (e.g., missing a required component, violating a constraint).
- Capture implicit abilities, domain knowledge, or safety requirements demonstrated or implied by the [Reference Answer] as failure modes when absent.
- Include quality assurance penalties for responses that fall below the rigor, structure, or completeness of the [Reference Answer].

2. Consistency Between Question & Reference:
- When the [Reference Answer] adds clarifications, safety notes, or formatting patterns absent from the [Question], add penalties for failing to follow those expectations.
- If the [Reference Answer] reveals missing information, add penalties for failing to request clarifications or failing to hedge assumptions.

3. Atomicity and Independence:
- Each criterion must evaluate exactly one minimal, independently verifiable violation.
- Avoid overlapping or redundant violations.

4. Quantity and Coverage:
- Criteria jointly cover every requirement necessary to match the [Reference Answer] and satisfy the [Question], expressed as penalizable failures.

5. Clarity and Verifiability:
- Use precise language without ambiguity. Avoid vague words like “good” or “almost”.
- Violations must be directly checkable against a candidate’s response.

6. Specificity and Contextualization:
- Do not produce generic, reusable criteria; make them specific to the concrete scenario/entities/constraints in [Question] and [Reference Answer].

7. Information Completeness Assessment:
- When the [Question] lacks key details, penalize failing to ask necessary clarifications or failing to explicitly state assumptions/uncertainty.

8. Summarization & Structure:
- For complex tasks, penalize missing required structure, missing summaries, or disorganized output when structure is expected per [Reference Answer].

9. Detail and Specificity:
- Penalize shallow, non-specific, or non-evidenced responses when [Reference Answer] indicates detailed steps/examples/evidence are expected.

10. Safety and Professional Responsibility:
- When the topic involves risk, legal/medical/financial guidance, or sensitive actions, penalize missing cautions, missing uncertainty handling, or unsafe instructions, as implied by the [Reference Answer].

11. Balance and Comprehensiveness:
- If recommendations are involved, penalize one-sided discussion that omits material pros/cons or context-sensitive caveats present in the [Reference Answer].

12. Language Consistency:
- `title` and `description` must match the language used in the [Question].

13. Penalty Wording:
- `description` must be written as “Penalize if ...” / “Apply penalty when ...”, describing the exact violation.

## Format Example (For format reference only; design content based on specific questions, do not copy directly)
```json
[  {
    "title":"Wrong Output Format",
    "description":"Penalize if the response includes any non-JSON text, missing the required Markdown code block wrapper.",
    "weight":-10
  },
  {
    "title":"Missing Key Constraint",
    "description":"Penalize if any explicit constraint from the question is ignored or contradicted.",
    "weight":-8
  }
]
```

# [Output Requirements] (Most Important!)
* JSON Only: Your response must be and can only be a JSON array wrapped in a Markdown code block.
* No Additional Content: Strictly forbidden to add any introduction, explanation, title, comment, or summary text before or after the code block."##;

/// Positive-criteria generator: derives reward criteria from a query and one
/// reference answer.
pub const GEN_POSITIVE_BODY: &str = r##"# Role
You are a top-tier Rubric Designer. Your sole task is to design JSON-formatted evaluation rubrics based on both the [Question] and the [Reference Answer] provided by the user.

# Core Task
1. Analyze [Question]: Understand every explicit and implicit requirement in the [Question].
2. Leverage [Reference Answer]: Use the [Reference Answer] to capture nuanced expectations, desirable reasoning patterns, and formatting details that high-quality responses should exhibit. Treat it as authoritative context, not content to be copied.
3. Create Rubrics: Following the [Evaluation Criteria Format] and [Design Rules] below, develop 3 to 25 evaluation criteria that ensure candidate answers respond to the [Question] and match the quality demonstrated in the [Reference Answer].
4. Output Format: Must strictly follow the [Output Requirements] with no additional text.

# [Question]
<<query>>

# [Reference Answer]
<<reference>>

# [Evaluation Criteria Format] - Each criterion must contain the following fields:
1. `title`: (String) A 2-5 word core summary.
2. `description`: (String) A clear description of no more than 40 words or 5 sentences.
3. `weight`: (Integer) A score between 0 and 10.

# [Design Rules] - You must strictly adhere to all the following rules:

1. Instruction & Reference Alignment (Highest Priority):
- Cover every explicit instruction in the [Question].
- Capture implicit abilities, domain knowledge, or safety requirements demonstrated or implied by the [Reference Answer].
- Include quality assurance criteria that ensure candidate responses match or exceed the rigor, structure, and completeness of the [Reference Answer].

2. Consistency Between Question & Reference:
- When the [Reference Answer] adds clarifications, safety notes, or formatting patterns absent from the [Question], include rubrics that enforce those expectations.
- If the [Reference Answer] reveals missing information, add criteria that reward proactive clarification or careful hedging.

3. Atomicity and Independence:
- Each criterion must evaluate exactly one minimal, independently verifiable dimension.
- Avoid overlapping or redundant criteria.

4. Quantity and Coverage:
- Ensure criteria jointly cover every requirement necessary to recreate the strengths of the [Reference Answer] while satisfying the [Question].

5. Clarity and Verifiability:
- Use precise language without ambiguity. Avoid vague words like "good" or "almost".
- Criteria must be directly checkable against a candidate's response.

6. Specificity and Contextualization:
- Design criteria that reflect the concrete scenario, entities, and constraints from the [Question] and [Reference Answer].
- Do not produce generic, reusable criteria.

7. Information Completeness Assessment:
- When the [Question] lacks key details, create criteria that reward requesting necessary clarifications or acknowledging assumptions, as modeled by the [Reference Answer].

8. Summarization & Structure:
- For complex tasks, include criteria for providing structured organization or succinct summaries, especially if the [Reference Answer] demonstrates such traits.

9. Detail and Specificity:
- Encourage detailed steps, concrete examples, or evidence similar to those in the [Reference Answer].

10. Safety and Professional Responsibility:
- When the topic involves risk, legal/medical/financial guidance, or sensitive actions, include criteria for explicit cautions, professional referrals, or uncertainty handling that align with the [Reference Answer].

11. Balance and Comprehensiveness:
- If recommendations are involved, ensure criteria check for balanced discussion of pros/cons or context-sensitive advice, mirroring the [Reference Answer] where applicable.

12. Language Consistency:
- `title` and `description` must match the language used in the [Question].

## Format Example (For format reference only; design content based on specific questions, do not copy directly)

```json
[  {
    "title": "Follow Question Format",
    "description": "Strictly answer in the format specified by the question (only write the option letter, no explanation).",
    "weight": 10
  },
  {
    "title": "Single Final Answer",
    "description": "Clearly provide a single final option, formatted as 'Final Answer: (B)'.",
    "weight": 8
  },
  {
    "title": "Cover Key Clues",
    "description": "Answer based on key information from the prompt rather than common sense speculation, directly verifiable from the prompt.",
    "weight": 7
  },
  {
    "title": "Answer Consistency",
    "description": "No contradictory options or logical confusion throughout the entire response.",
    "weight": 6
  },
  {
    "title": "Conciseness",
    "description": "Answer is concise and clear, without redundant explanations or off-topic content.",
    "weight": 5
  }
]
```

# [Output Requirements] (Most Important!)
* JSON Only: Your response must be and can only be a JSON array wrapped in a Markdown code block.
* No Additional Content: Strictly forbidden to add any introduction, explanation, title, comment, or summary text before or after the code block."##;

/// Pairwise rubric merger: folds two criterion sets for the same prompt into
/// one consolidated set.
pub const AGGREGATE_BODY: &str = r##"# Role
You are an Expert Rubric Designer and QA Specialist. Your task is to merge two sets of evaluation rubrics (Rubrics 1 and Rubrics 2) based on a specific User Prompt into a single, consolidated, and high-quality Master Rubric.

# Context Data
## User Prompt
<prompt>
{|prompt|}
</prompt>

## Existing Rubrics 1
<rubrics1>
{|rubrics1|}
</rubrics1>

## Existing Rubrics 2
<rubrics2>
{|rubrics2|}
</rubrics2>

# Task Instructions

Please execute the merge following this strict protocol:

### 1. Aggregation & Analysis
- List all criteria from both Rubrics 1 and Rubrics 2.
- Analyze each criterion against the original `User Prompt` to ensure relevance.

### 2. Conservative Deduplication Strategy (CRITICAL)
You must apply a **Conservative Merging Strategy**. Do NOT merge items merely because they look similar.
- **MERGE ONLY IF**:
  - The semantic meaning is 100% identical.
  - The action required is exactly the same.
  - The scope and object of the check are identical.
  - *Example (Merge)*: "Check if power is on" AND "Verify device is powered up".
- **DO NOT MERGE (Keep Separate) IF**:
  - There is a difference in granularity (General vs. Specific).
  - There are different parameters or thresholds (e.g., ">50%" vs ">60%").
  - One implies a specific method and the other does not.
  - *Example (Keep Separate)*: "Check spelling" vs. "Check grammar".
  - *Example (Keep Separate)*: "Verify code compiles" vs. "Verify code compiles without warnings".

### 3. Conflict Resolution & Refinement
- **Wording**: When merging, select the phrasing that is more professional, concise, and unambiguous.
- **Weights**: If two merged items have different weights, retain the higher weight to ensure strict quality control.
- **Binary Standard**: Ensure every `description` is binary (True/False) and discriminative. Avoid vague words like "good" or "appropriate"; use observable criteria instead.


# Output Structure
The output must be a JSON array of objects. Each object must strictly follow this schema:

```json
[  {
    "title": "Original Title",
    "description": "A strict, binary, and discriminative criterion. Must be verifiable.",
    "weight": "Integer Value"
  },
  ...
]"##;

/// Difficulty evolution: proposes stricter criteria that separate a
/// reference response pair.
pub const EVOLVE_BODY: &str = r##"# Role
You are an expert evaluator specializing in high-precision assessment of LLM responses. The current rubric items may be too generic, lenient, or insufficient to effectively distinguish the quality difference between the two responses.
Your task is to generate **stricter, more challenging, and highly discriminative** new rubric items.

# Goal
Analyze the User Prompt, Existing Rubrics, and the two Responses.
You must create **"Harder Versions"** of criteria. These should be specific, rigorous standards that go beyond basic correctness.

**Core Objective**: The new rubric items should successfully **differentiate** the responses. Ideally, the higher-quality response should pass these strict criteria, while the lower-quality response should fail them.

# Principles
Follow these rules when generating new rubrics:

1. **Discriminative Difficulty**
  - Do not add easy criteria that both responses satisfy.
  - Identify nuances, edge cases, or depth requirements where the responses differ.
  - Upgrade generic criteria (e.g., "Answer is correct") to strict constraints (e.g., "Answer correctly handles exception X and provides mathematical proof Y").

2. **Specificity & Rigor**
  - Avoid subjective terms like "better flow" or "more detailed."
  - Use concrete checks: "Includes a step-by-step derivation," "Mentions specific limitation Z," or "Follows format X exactly."

3. **Atomicity & Objectivity**
  - Each item must assess a single, distinct aspect.
  - Items must be **Binary (True/False)** and objectively verifiable.

4. **Language**
  - The language of the new rubrics must match the language of the `<prompt>`.

# User Prompt
<prompt>
{|prompt|}
</prompt>

# Existing Rubrics
<rubrics>
{|rubrics|}
</rubrics>

# Responses
<response1>
{|response1|}
</response1>

<response2>
{|response2|}
</response2>

# Output
Return **only** a JSON array containing the **newly generated, stricter rubric items**.
Do **not** output the original rubrics.
Do **not** output explanations.

Each rubric item must follow this structure:

```json
[  {
    "title": "Short title, same as the original criterion to be upgraded",
    "description": "A strict, binary, and discriminative criterion",
    "weight": "Score Value"
  },
  ...
]"##;

/// The built-in templates by role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TemplateName {
    Grader,
    GenPositive,
    GenPenalty,
    Aggregate,
    Evolve,
}

impl TemplateName {
    pub fn as_str(&self) -> &'static str {
        match self {
            TemplateName::Grader => "grader",
            TemplateName::GenPositive => "gen_positive",
            TemplateName::GenPenalty => "gen_penalty",
            TemplateName::Aggregate => "aggregate",
            TemplateName::Evolve => "evolve",
        }
    }

    pub fn body(&self) -> &'static str {
        match self {
            TemplateName::Grader => GRADER_BODY,
            TemplateName::GenPositive => GEN_POSITIVE_BODY,
            TemplateName::GenPenalty => GEN_PENALTY_BODY,
            TemplateName::Aggregate => AGGREGATE_BODY,
            TemplateName::Evolve => EVOLVE_BODY,
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RenderError {
    #[error("MISSING_SLOT: template `{template}` needs a binding for `{slot}`")]
    MissingSlot { template: String, slot: String },
    #[error("UNKNOWN_SLOT: template `{template}` has no slot `{slot}`")]
    UnknownSlot { template: String, slot: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Segment {
    Literal(String),
    Slot(String),
}

/// A compiled template: literal runs and named slots, in document order.
#[derive(Debug, Clone)]
pub struct PromptTemplate {
    name: String,
    segments: Vec<Segment>,
    slots: BTreeSet<String>,
}

fn slot_name_valid(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

impl PromptTemplate {
    /// Compiles `body`, recognizing `<<name>>` and `{|name|}` placeholders.
    /// Marker-like text that does not wrap a valid slot name (letters,
    /// digits, underscores) stays literal.
    pub fn new(name: impl Into<String>, body: &str) -> Self {
        let mut segments = Vec::new();
        let mut slots = BTreeSet::new();
        let mut literal = String::new();
        let mut rest = body;
        'scan: while !rest.is_empty() {
            for (open, close) in [("<<", ">>"), ("{|", "|}")] {
                if let Some(after_open) = rest.strip_prefix(open) {
                    if let Some(end) = after_open.find(close) {
                        let candidate = &after_open[..end];
                        if slot_name_valid(candidate) {
                            if !literal.is_empty() {
                                segments.push(Segment::Literal(std::mem::take(&mut literal)));
                            }
                            segments.push(Segment::Slot(candidate.to_string()));
                            slots.insert(candidate.to_string());
                            rest = &after_open[end + close.len()..];
                            continue 'scan;
                        }
                    }
                }
            }
            let ch = rest.chars().next().expect("non-empty");
            literal.push(ch);
            rest = &rest[ch.len_utf8()..];
        }
        if !literal.is_empty() {
            segments.push(Segment::Literal(literal));
        }
        PromptTemplate {
            name: name.into(),
            segments,
            slots,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Slot names this template requires, sorted.
    pub fn slots(&self) -> &BTreeSet<String> {
        &self.slots
    }

    /// Substitutes every slot with its binding. Values are inserted verbatim
    /// and never rescanned. Bindings for slots the template lacks are
    /// ignored; use [`PromptTemplate::render_strict`] to reject them.
    pub fn render(&self, bindings: &BTreeMap<String, String>) -> Result<String, RenderError> {
        let mut out = String::new();
        for segment in &self.segments {
            match segment {
                Segment::Literal(text) => out.push_str(text),
                Segment::Slot(slot) => match bindings.get(slot) {
                    Some(value) => out.push_str(value),
                    None => {
                        return Err(RenderError::MissingSlot {
                            template: self.name.clone(),
                            slot: slot.clone(),
                        })
                    }
                },
            }
        }
        Ok(out)
    }

    /// Like [`PromptTemplate::render`], but a binding for a nonexistent slot
    /// is an error instead of being ignored.
    pub fn render_strict(&self, bindings: &BTreeMap<String, String>) -> Result<String, RenderError> {
        for key in bindings.keys() {
            if !self.slots.contains(key) {
                return Err(RenderError::UnknownSlot {
                    template: self.name.clone(),
                    slot: key.clone(),
                });
            }
        }
        self.render(bindings)
    }
}

/// The compiled built-in template for `name` (compiled once, cached).
pub fn builtin(name: TemplateName) -> &'static PromptTemplate {
    static CACHE: OnceLock<std::collections::HashMap<TemplateName, PromptTemplate>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(|| {
        [
            TemplateName::Grader,
            TemplateName::GenPositive,
            TemplateName::GenPenalty,
            TemplateName::Aggregate,
            TemplateName::Evolve,
        ]
        .into_iter()
        .map(|n| (n, PromptTemplate::new(n.as_str(), n.body())))
        .collect()
    });
    cache.get(&name).expect("all built-ins compiled")
}

/// Convenience for building a bindings map from pairs.
pub fn bindings<const N: usize>(pairs: [(&str, &str); N]) -> BTreeMap<String, String> {
    pairs
        .into_iter()
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use sha2::{Digest, Sha256};

    fn sha256_hex(text: &str) -> String {
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    /// The template bodies are frozen. If this test fails, a body was
    /// edited; deliberate edits must update the pinned digests.
    #[test]
    fn template_bodies_are_pinned() {
        let pinned = [
            (
                TemplateName::Grader,
                "1a9c7e2f2dd9d4df13491dff025b2298cc040f5fafd170a6fba069549d70ea02",
            ),
            (
                TemplateName::GenPositive,
                "c75bcc98c6af515b07055e5d6a1c5be68b0a000f9456a6bfde92e0b5fa95222e",
            ),
            (
                TemplateName::GenPenalty,
                "b55ddbc0f683955a02308897bfae70724245ab82ff188a3caea3232cc6f5e6e1",
            ),
            (
                TemplateName::Aggregate,
                "b9055f687d399f37a8aa0709aa561455a23821b103ce8acd2f23bca5e2e819bd",
            ),
            (
                TemplateName::Evolve,
                "fa7c3752eca4ea3a01a8315d4c90aa64211b8b290255bc2cc74dfb7c99a93844",
            ),
        ];
        let mut mismatches = Vec::new();
        for (name, expected) in pinned {
            let actual = sha256_hex(name.body());
            if actual != expected {
                mismatches.push(format!("({:?}) \"{}\"", name, actual));
            }
        }
        assert!(
            mismatches.is_empty(),
            "template bodies changed; current digests:\n{}",
            mismatches.join("\n")
        );
    }

    #[test]
    fn builtin_slot_sets_are_exact() {
        let slot_names = |t: TemplateName| -> Vec<&str> {
            builtin(t).slots().iter().map(String::as_str).collect()
        };
        assert_eq!(slot_names(TemplateName::Grader), ["conversation", "rubric_item"]);
        assert_eq!(slot_names(TemplateName::GenPositive), ["query", "reference"]);
        assert_eq!(slot_names(TemplateName::GenPenalty), ["query", "reference"]);
        assert_eq!(
            slot_names(TemplateName::Aggregate),
            ["prompt", "rubrics1", "rubrics2"]
        );
        assert_eq!(
            slot_names(TemplateName::Evolve),
            ["prompt", "response1", "response2", "rubrics"]
        );
    }

    #[test]
    fn render_fills_grader_slots() {
        let rendered = builtin(TemplateName::Grader)
            .render(&bindings([
                ("conversation", "user: hi\n\nassistant: hello"),
                ("rubric_item", "Greets the user (Points: 2)"),
            ]))
            .unwrap();
        assert!(rendered.contains("# Conversation\nuser: hi\n\nassistant: hello\n"));
        assert!(rendered.contains("# Rubric item\nGreets the user (Points: 2)\n"));
        assert!(!rendered.contains("<<"), "unfilled marker left behind");
    }

    #[test]
    fn render_fills_aggregate_slots() {
        let rendered = builtin(TemplateName::Aggregate)
            .render(&bindings([
                ("prompt", "Explain tides."),
                ("rubrics1", "[r1]"),
                ("rubrics2", "[r2]"),
            ]))
            .unwrap();
        assert!(rendered.contains("<prompt>\nExplain tides.\n</prompt>"));
        assert!(rendered.contains("<rubrics1>\n[r1]\n</rubrics1>"));
        assert!(rendered.contains("<rubrics2>\n[r2]\n</rubrics2>"));
        assert!(!rendered.contains("{|"));
    }

    #[test]
    fn missing_binding_is_reported_with_slot_name() {
        let err = builtin(TemplateName::Grader)
            .render(&bindings([("conversation", "user: hi")]))
            .unwrap_err();
        assert_eq!(
            err,
            RenderError::MissingSlot {
                template: "grader".to_string(),
                slot: "rubric_item".to_string()
            }
        );
    }

    #[test]
    fn strict_render_rejects_unknown_bindings() {
        let err = builtin(TemplateName::Grader)
            .render_strict(&bindings([
                ("conversation", "c"),
                ("rubric_item", "r"),
                ("extra", "x"),
            ]))
            .unwrap_err();
        assert!(matches!(err, RenderError::UnknownSlot { slot, .. } if slot == "extra"));
    }

    #[test]
    fn inserted_values_are_never_rescanned() {
        let template = PromptTemplate::new("t", "a <<x>> b <<y>> c");
        let rendered = template
            .render(&bindings([("x", "<<y>>"), ("y", "Y")]))
            .unwrap();
        assert_eq!(rendered, "a <<y>> b Y c");
    }

    #[test]
    fn marker_like_text_without_valid_name_stays_literal() {
        let template = PromptTemplate::new("t", "<<not a slot>> {|nor this!|} <<ok_1>>");
        assert_eq!(template.slots().len(), 1);
        let rendered = template.render(&bindings([("ok_1", "V")])).unwrap();
        assert_eq!(rendered, "<<not a slot>> {|nor this!|} V");
    }

    #[test]
    fn both_syntaxes_work_in_one_body() {
        let template = PromptTemplate::new("t", "<<a>>+{|b|}");
        let rendered = template.render(&bindings([("a", "1"), ("b", "2")])).unwrap();
        assert_eq!(rendered, "1+2");
    }

    #[test]
    fn grader_template_examples_carry_the_wire_shape() {
        // The judge prompt teaches the reply format by example; the parser
        // in the grading engine must accept exactly those examples.
        assert!(GRADER_BODY.contains("\"criteria_met\": false"));
        assert!(GRADER_BODY.matches("```json").count() == 3);
    }

    #[test]
    fn generator_bodies_state_their_weight_ranges() {
        assert!(GEN_POSITIVE_BODY.contains("A score between 0 and 10."));
        assert!(GEN_PENALTY_BODY.contains("A negative score between -10 and -1."));
        assert!(GEN_PENALTY_BODY.contains("develop 3 to 25 penalty criteria"));
        assert!(GEN_POSITIVE_BODY.contains("develop 3 to 25 evaluation criteria"));
    }
}
