use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A single move in the prisoner's dilemma.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Action {
    #[serde(rename = "C")]
    Cooperate,
    #[serde(rename = "D")]
    Defect,
}

impl Action {
    pub fn flipped(self) -> Self {
        match self {
            Action::Cooperate => Action::Defect,
            Action::Defect => Action::Cooperate,
        }
    }

    pub fn is_cooperate(self) -> bool {
        self == Action::Cooperate
    }

    pub fn as_char(self) -> char {
        match self {
            Action::Cooperate => 'C',
            Action::Defect => 'D',
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}

/// Strategic disposition tag carried by every strategy and agent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Attitude {
    Aggressive,
    Cooperative,
    Neutral,
}

impl Attitude {
    /// Canonical order used for every 3x3 table: A, C, N.
    pub const ALL: [Attitude; 3] = [Attitude::Aggressive, Attitude::Cooperative, Attitude::Neutral];

    pub fn index(self) -> usize {
        match self {
            Attitude::Aggressive => 0,
            Attitude::Cooperative => 1,
            Attitude::Neutral => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            Attitude::Aggressive => "aggressive",
            Attitude::Cooperative => "cooperative",
            Attitude::Neutral => "neutral",
        }
    }

    /// Single-letter code (A, C, N).
    pub fn code(self) -> char {
        match self {
            Attitude::Aggressive => 'A',
            Attitude::Cooperative => 'C',
            Attitude::Neutral => 'N',
        }
    }
}

impl fmt::Display for Attitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown attitude `{0}` (expected one of: aggressive, cooperative, neutral)")]
pub struct UnknownAttitude(pub String);

impl FromStr for Attitude {
    type Err = UnknownAttitude;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "aggressive" | "a" => Ok(Attitude::Aggressive),
            "cooperative" | "c" => Ok(Attitude::Cooperative),
            "neutral" | "n" => Ok(Attitude::Neutral),
            _ => Err(UnknownAttitude(s.to_string())),
        }
    }
}

/// Prompt style label of a strategy set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PromptLabel {
    Default,
    Prose,
    Refine,
}

impl PromptLabel {
    pub const ALL: [PromptLabel; 3] = [PromptLabel::Default, PromptLabel::Prose, PromptLabel::Refine];

    pub fn name(self) -> &'static str {
        match self {
            PromptLabel::Default => "default",
            PromptLabel::Prose => "prose",
            PromptLabel::Refine => "refine",
        }
    }
}

impl fmt::Display for PromptLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown prompt label `{0}` (expected one of: default, prose, refine)")]
pub struct UnknownPrompt(pub String);

impl FromStr for PromptLabel {
    type Err = UnknownPrompt;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "default" => Ok(PromptLabel::Default),
            "prose" => Ok(PromptLabel::Prose),
            "refine" | "self-refine" => Ok(PromptLabel::Refine),
            _ => Err(UnknownPrompt(s.to_string())),
        }
    }
}
