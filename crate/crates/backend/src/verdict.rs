use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sonomorph_audio::AudioBuffer;
use sonomorph_linguistic::Transcript;

use crate::{BackendError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Insult,
    Porn,
    Spam,
    NonToxic,
}

impl Category {
    pub const ALL: [Category; 4] = [Category::Insult, Category::Porn, Category::Spam, Category::NonToxic];

    pub fn is_toxic(self) -> bool {
        self != Category::NonToxic
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Category::Insult => "insult",
            Category::Porn => "porn",
            Category::Spam => "spam",
            Category::NonToxic => "non_toxic",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Category {
    type Err = BackendError;

    fn from_str(s: &str) -> Result<Self> {
        Category::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| BackendError::Mapping(format!("unknown category `{s}`")))
    }
}

/// A single moderation decision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    /// Provider payload kept for audit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raw: Option<serde_json::Value>,
}

impl Verdict {
    pub fn new(category: Category, confidence: Option<f64>) -> Result<Self> {
        if let Some(c) = confidence {
            if !(0.0..=1.0).contains(&c) {
                return Err(BackendError::Mapping(format!("confidence {c} outside [0, 1]")));
            }
        }
        Ok(Self {
            category,
            confidence,
            raw: None,
        })
    }
}

/// A system under test. Implementations are shared across campaign workers.
pub trait ModerationBackend: Send + Sync {
    fn name(&self) -> &str;

    /// Classifies `audio`. Backends that work on speech may use
    /// `transcript_hint`; others ignore it.
    fn moderate(&self, audio: &AudioBuffer, transcript_hint: Option<&Transcript>) -> Result<Verdict>;
}
