use std::collections::BTreeMap;
use std::path::Path;

use crate::{Language, LinguisticError, Result};

/// One replacement candidate. Without votes, candidates rank by list order;
/// with votes, by descending vote count, and equal counts are tied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub text: String,
    pub votes: Option<u32>,
}

/// Curated map from a word to phonetically similar replacements.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HomophoneLexicon {
    pub language: Language,
    entries: BTreeMap<String, Vec<Candidate>>,
}

impl HomophoneLexicon {
    pub fn new(language: Language) -> Self {
        Self {
            language,
            entries: BTreeMap::new(),
        }
    }

    /// The English starter set: fuck→folk, shit→sheet, dick→deck.
    pub fn english_default() -> Self {
        let mut lex = Self::new(Language::En);
        for (word, candidate) in [("fuck", "folk"), ("shit", "sheet"), ("dick", "deck")] {
            lex.insert(word, vec![Candidate { text: candidate.into(), votes: None }])
                .expect("built-in entries are valid");
        }
        lex
    }

    pub fn insert(&mut self, word: &str, candidates: Vec<Candidate>) -> Result<()> {
        let key = self.language.normalize(word.trim());
        if key.is_empty() {
            return Err(LinguisticError::Parameter("empty lexicon key".into()));
        }
        if candidates.is_empty() {
            return Err(LinguisticError::Parameter(format!("`{key}` has no candidates")));
        }
        if let Some(c) = candidates.iter().find(|c| self.language.normalize(&c.text) == key) {
            return Err(LinguisticError::Parameter(format!(
                "candidate `{}` equals its key `{key}`",
                c.text
            )));
        }
        self.entries.insert(key, candidates);
        Ok(())
    }

    /// Adds every entry of `other`, replacing entries with the same key.
    pub fn extend(&mut self, other: HomophoneLexicon) -> Result<()> {
        for (k, v) in other.entries {
            self.insert(&k, v)?;
        }
        Ok(())
    }

    pub fn get(&self, word: &str) -> Option<&[Candidate]> {
        self.entries.get(&self.language.normalize(word)).map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Candidates sharing the best rank.
    pub fn top_ranked(&self, word: &str) -> Option<Vec<&str>> {
        let cands = self.get(word)?;
        let best_votes = cands.iter().filter_map(|c| c.votes).max();
        let top = match best_votes {
            Some(v) => cands
                .iter()
                .filter(|c| c.votes == Some(v))
                .map(|c| c.text.as_str())
                .collect(),
            None => vec![cands[0].text.as_str()],
        };
        Some(top)
    }

    /// Parses `word<TAB>candidate1,candidate2,...`; a candidate may carry a
    /// vote count as `candidate:votes`. Blank lines and `#` comments are
    /// skipped.
    pub fn parse(text: &str, language: Language) -> Result<Self> {
        let mut lex = Self::new(language);
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (word, rest) = line.split_once('\t').ok_or_else(|| LinguisticError::Parse {
                line: line_no,
                message: "expected `word<TAB>candidates`".into(),
            })?;
            let candidates = rest
                .split(',')
                .map(str::trim)
                .filter(|c| !c.is_empty())
                .map(|c| parse_candidate(c, line_no))
                .collect::<Result<Vec<_>>>()?;
            lex.insert(word, candidates).map_err(|e| LinguisticError::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        Ok(lex)
    }

    pub fn load(path: impl AsRef<Path>, language: Language) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, language)
    }
}

fn parse_candidate(raw: &str, line: usize) -> Result<Candidate> {
    if let Some((text, votes)) = raw.rsplit_once(':') {
        if !votes.is_empty() && votes.chars().all(|c| c.is_ascii_digit()) {
            let votes = votes.parse().map_err(|e| LinguisticError::Parse {
                line,
                message: format!("bad vote count in `{raw}`: {e}"),
            })?;
            return Ok(Candidate {
                text: text.trim().to_string(),
                votes: Some(votes),
            });
        }
    }
    Ok(Candidate {
        text: raw.to_string(),
        votes: None,
    })
}
