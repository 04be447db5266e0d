use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{HomophoneLexicon, LinguisticError, Result, Transcript};

/// What a substitution pass did.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionTally {
    pub substituted: usize,
    /// Target occurrences with no lexicon entry, passed through unchanged.
    pub missing: Vec<String>,
}

/// Replaces every target token that has a lexicon entry with its top-ranked
/// candidate. Rank ties are broken by a ChaCha8 stream seeded with `seed`,
/// drawn once per tied site in token order. Alignment spans carry over.
pub fn homophone_substitute(
    transcript: &Transcript,
    lexicon: &HomophoneLexicon,
    targets: &HashSet<String>,
    seed: u64,
) -> Result<(Transcript, SubstitutionTally)> {
    if lexicon.language != transcript.language {
        return Err(LinguisticError::Domain(format!(
            "lexicon language {:?} does not match transcript language {:?}",
            lexicon.language, transcript.language
        )));
    }
    let targets: HashSet<String> = targets.iter().map(|t| transcript.language.normalize(t)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SubstitutionTally::default();
    let mut out = transcript.clone();
    for (i, token) in out.tokens.iter_mut().enumerate() {
        if !transcript.matches(i, &targets) {
            continue;
        }
        match lexicon.top_ranked(token) {
            Some(top) => {
                let pick = if top.len() == 1 { 0 } else { rng.gen_range(0..top.len()) };
                *token = top[pick].to_string();
                tally.substituted += 1;
            }
            None => tally.missing.push(token.clone()),
        }
    }
    Ok((out, tally))
}
