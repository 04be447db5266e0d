use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::{Language, LinguisticError, Result, Transcript};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KeywordScore {
    pub token: String,
    pub tf_idf: f64,
    pub document_frequency: usize,
}

/// Smoothed inverse document frequency, `ln((1 + N) / (1 + df)) + 1`.
fn idf(documents: usize, df: usize) -> f64 {
    ((1.0 + documents as f64) / (1.0 + df as f64)).ln() + 1.0
}

/// Top-`k` tokens by TF-IDF after removing `stopwords`.
///
/// A token's score is its maximum over documents of `tf(t, d) · idf(t)`,
/// with raw counts for `tf`. Results are sorted by descending score, ties by
/// token. Asking for more tokens than the vocabulary holds returns all of it.
pub fn select_keywords(
    corpus: &[Transcript],
    stopwords: &HashSet<String>,
    k: usize,
) -> Result<Vec<KeywordScore>> {
    if corpus.is_empty() {
        return Err(LinguisticError::Domain("keyword selection on an empty corpus".into()));
    }
    if k == 0 {
        return Err(LinguisticError::Parameter("k must be positive".into()));
    }
    let mut counts: Vec<BTreeMap<String, usize>> = Vec::with_capacity(corpus.len());
    let mut df: BTreeMap<String, usize> = BTreeMap::new();
    for doc in corpus {
        let mut tf = BTreeMap::new();
        for token in &doc.tokens {
            let t = doc.language.normalize(token);
            if stopwords.contains(&t) || crate::is_marker(&t) {
                continue;
            }
            *tf.entry(t).or_insert(0) += 1;
        }
        for t in tf.keys() {
            *df.entry(t.clone()).or_insert(0) += 1;
        }
        counts.push(tf);
    }
    let n = corpus.len();
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for tf in &counts {
        for (t, &c) in tf {
            let score = c as f64 * idf(n, df[t]);
            let slot = best.entry(t.as_str()).or_insert(0.0);
            if score > *slot {
                *slot = score;
            }
        }
    }
    let mut scored: Vec<KeywordScore> = best
        .into_iter()
        .map(|(t, s)| KeywordScore {
            token: t.to_string(),
            tf_idf: s,
            document_frequency: df[t],
        })
        .collect();
    scored.sort_by(|a, b| b.tf_idf.total_cmp(&a.tf_idf).then_with(|| a.token.cmp(&b.token)));
    scored.truncate(k);
    Ok(scored)
}

/// One document per non-empty line, whitespace-separated tokens.
pub fn parse_corpus(text: &str, language: Language) -> Vec<Transcript> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| Transcript::from_text(l, language))
        .collect()
}

/// One stop-word per line, normalized for `language`.
pub fn parse_stopwords(text: &str, language: Language) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| language.normalize(l))
        .collect()
}
