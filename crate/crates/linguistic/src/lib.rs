//! Linguistic-form perturbations. These operate on transcripts: homophone
//! substitution and stutter-style discontinuity produce new text for a speech
//! synthesizer, and the audio variant of discontinuity splices an aligned
//! recording directly. Keyword selection picks the target words.

mod discontinuity;
mod error;
mod keywords;
mod lexicon;
mod substitute;
mod transcript;
pub mod tts;

pub use discontinuity::{benign_discontinuity_audio, benign_discontinuity_text, discontinuity_sites};
pub use error::LinguisticError;
pub use keywords::{parse_corpus, parse_stopwords, select_keywords, KeywordScore};
pub use lexicon::{Candidate, HomophoneLexicon};
pub use substitute::{homophone_substitute, SubstitutionTally};
pub use transcript::{is_marker, Language, Span, Transcript};

pub type Result<T, E = LinguisticError> = std::result::Result<T, E>;
