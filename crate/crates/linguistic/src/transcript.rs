use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{LinguisticError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    #[default]
    En,
    Zh,
}

impl Language {
    /// Case folding used for matching. Chinese text is left untouched.
    pub fn normalize(self, token: &str) -> String {
        match self {
            Language::En => token.to_lowercase(),
            Language::Zh => token.to_string(),
        }
    }
}

/// Word-level time span into a paired recording, in seconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Span {
    pub start_s: f64,
    pub end_s: f64,
}

/// Tokens of an utterance with optional per-token alignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub tokens: Vec<String>,
    pub language: Language,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alignment: Option<Vec<Span>>,
}

/// A token carrying no letters or digits, e.g. the `...` pause marker.
pub fn is_marker(token: &str) -> bool {
    !token.chars().any(char::is_alphanumeric)
}

impl Transcript {
    pub fn new(tokens: Vec<String>, language: Language) -> Self {
        Self {
            tokens,
            language,
            alignment: None,
        }
    }

    /// Splits on whitespace.
    pub fn from_text(text: &str, language: Language) -> Self {
        Self::new(text.split_whitespace().map(str::to_string).collect(), language)
    }

    pub fn with_alignment(mut self, alignment: Vec<Span>) -> Result<Self> {
        self.alignment = Some(alignment);
        self.validate(None)?;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Checks that the alignment (if any) matches the tokens, is monotone and
    /// non-overlapping, and ends within `duration_s` when given.
    pub fn validate(&self, duration_s: Option<f64>) -> Result<()> {
        let Some(spans) = &self.alignment else {
            return Ok(());
        };
        if spans.len() != self.tokens.len() {
            return Err(LinguisticError::Domain(format!(
                "{} alignment spans for {} tokens",
                spans.len(),
                self.tokens.len()
            )));
        }
        let mut last_end = 0.0;
        for (i, s) in spans.iter().enumerate() {
            if !(s.start_s.is_finite() && s.end_s.is_finite()) || s.start_s < last_end || s.end_s < s.start_s {
                return Err(LinguisticError::Domain(format!(
                    "alignment span {i} [{}, {}] is not monotone and non-overlapping",
                    s.start_s, s.end_s
                )));
            }
            last_end = s.end_s;
        }
        if let Some(d) = duration_s {
            if last_end > d + 1e-9 {
                return Err(LinguisticError::Domain(format!(
                    "alignment ends at {last_end} s beyond the {d} s recording"
                )));
            }
        }
        Ok(())
    }

    /// Normalized token set membership test.
    pub fn matches(&self, index: usize, targets: &HashSet<String>) -> bool {
        targets.contains(&self.language.normalize(&self.tokens[index]))
    }

    /// Surface text: English tokens are space-separated with markers attached
    /// to the preceding word ("a... a... bitch"); Chinese is concatenated.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for token in &self.tokens {
            let attach = self.language == Language::Zh || is_marker(token) || out.is_empty();
            if !attach {
                out.push(' ');
            }
            out.push_str(token);
        }
        out
    }

    /// Parses the tab-separated transcript format: one token per line,
    /// optionally followed by `start_s` and `end_s`. Either every line is
    /// aligned or none is; blank lines are skipped.
    pub fn parse(text: &str, language: Language) -> Result<Self> {
        let mut tokens = Vec::new();
        let mut spans = Vec::new();
        let mut aligned: Option<bool> = None;
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let has_times = match fields.len() {
                1 => false,
                3 => true,
                n => {
                    return Err(LinguisticError::Parse {
                        line: line_no,
                        message: format!("expected 1 or 3 tab-separated fields, found {n}"),
                    })
                }
            };
            if *aligned.get_or_insert(has_times) != has_times {
                return Err(LinguisticError::Parse {
                    line: line_no,
                    message: "alignment columns must be present on every line or none".into(),
                });
            }
            let token = fields[0].trim();
            if token.is_empty() {
                return Err(LinguisticError::Parse {
                    line: line_no,
                    message: "empty token".into(),
                });
            }
            tokens.push(token.to_string());
            if has_times {
                let num = |s: &str| {
                    s.trim().parse::<f64>().map_err(|e| LinguisticError::Parse {
                        line: line_no,
                        message: format!("bad time `{s}`: {e}"),
                    })
                };
                spans.push(Span {
                    start_s: num(fields[1])?,
                    end_s: num(fields[2])?,
                });
            }
        }
        let t = Self::new(tokens, language);
        if aligned == Some(true) {
            t.with_alignment(spans)
        } else {
            Ok(t)
        }
    }

    pub fn load(path: impl AsRef<Path>, language: Language) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, language)
    }

    /// Inverse of [`Transcript::parse`].
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (i, token) in self.tokens.iter().enumerate() {
            match &self.alignment {
                Some(spans) => {
                    let s = spans[i];
                    let _ = writeln!(out, "{token}\t{}\t{}", s.start_s, s.end_s);
                }
                None => {
                    let _ = writeln!(out, "{token}");
                }
            }
        }
        out
    }
}
