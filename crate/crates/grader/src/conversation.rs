//! Conversations: the unit a rubric is graded against.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

impl Role {
    pub fn as_str(&self) -> &'static str {
        match self {
            Role::System => "system",
            Role::User => "user",
            Role::Assistant => "assistant",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Turn {
    pub role: Role,
    pub content: String,
}

/// An ordered exchange; grading always targets the last assistant turn.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Conversation {
    pub turns: Vec<Turn>,
}

impl Conversation {
    /// The common single-exchange case: one user prompt, one assistant
    /// response.
    pub fn from_prompt_response(prompt: impl Into<String>, response: impl Into<String>) -> Self {
        Conversation {
            turns: vec![
                Turn {
                    role: Role::User,
                    content: prompt.into(),
                },
                Turn {
                    role: Role::Assistant,
                    content: response.into(),
                },
            ],
        }
    }

    pub fn ends_with_assistant(&self) -> bool {
        matches!(
            self.turns.last(),
            Some(Turn {
                role: Role::Assistant,
                ..
            })
        )
    }

    /// Content of the final assistant turn — the completion being graded.
    pub fn last_assistant(&self) -> Option<&str> {
        match self.turns.last() {
            Some(Turn {
                role: Role::Assistant,
                content,
            }) => Some(content),
            _ => None,
        }
    }

    /// Plain-text form fed into the judge prompt: `role: content` turns
    /// separated by blank lines.
    pub fn render_text(&self) -> String {
        self.turns
            .iter()
            .map(|t| format!("{}: {}", t.role.as_str(), t.content))
            .collect::<Vec<_>>()
            .join("\n\n")
    }
}
