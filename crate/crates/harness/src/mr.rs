use std::collections::HashSet;

use serde::{Deserialize, Deserializer, Serialize};
use sonomorph_audio::AudioBuffer;
use sonomorph_linguistic::tts::Synthesizer;
use sonomorph_linguistic::{
    benign_discontinuity_audio, benign_discontinuity_text, discontinuity_sites, homophone_substitute,
    HomophoneLexicon, Language, Transcript,
};
use sonomorph_mr_basic::BasicPerturbation;
use sonomorph_mr_compound::CompoundPerturbation;

use crate::{HarnessError, Result};

/// Perturbations acting on the words of an utterance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum LinguisticPerturbation {
    /// Swap target words for homophones, then re-voice the text.
    HomophoneSubstitution { seed: u64 },
    /// Stutter before target words in the text, then re-voice it.
    DiscontinuityText {
        #[serde(default = "default_marker")]
        marker: String,
        repeats: usize,
    },
    /// Stutter before target words by splicing the aligned recording.
    DiscontinuityAudio { gap_s: f64, repeats: usize },
}

fn default_marker() -> String {
    "...".into()
}

impl LinguisticPerturbation {
    pub fn name(&self) -> &'static str {
        match self {
            LinguisticPerturbation::HomophoneSubstitution { .. } => "homophone_substitution",
            LinguisticPerturbation::DiscontinuityText { .. } => "discontinuity_text",
            LinguisticPerturbation::DiscontinuityAudio { .. } => "discontinuity_audio",
        }
    }

    /// Whether the output is text that must be voiced by a synthesizer.
    pub fn needs_synthesizer(&self) -> bool {
        !matches!(self, LinguisticPerturbation::DiscontinuityAudio { .. })
    }
}

/// Any perturbation a campaign can apply, written as a JSON object whose
/// `kind` names it, e.g. `{"kind": "gain", "db": 6}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum MrSpec {
    Basic(BasicPerturbation),
    Compound(CompoundPerturbation),
    Linguistic(LinguisticPerturbation),
}

impl<'de> Deserialize<'de> for MrSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error;
        let v = serde_json::Value::deserialize(d)?;
        let kind = v.get("kind").and_then(|k| k.as_str()).unwrap_or("").to_string();
        // The family whose tag matches reports its own field errors.
        let attempt = |e: serde_json::Error| {
            if e.to_string().starts_with("unknown variant") {
                None
            } else {
                Some(D::Error::custom(format!("perturbation `{kind}`: {e}")))
            }
        };
        match BasicPerturbation::deserialize(&v) {
            Ok(b) => return Ok(MrSpec::Basic(b)),
            Err(e) => {
                if let Some(e) = attempt(e) {
                    return Err(e);
                }
            }
        }
        match CompoundPerturbation::deserialize(&v) {
            Ok(c) => return Ok(MrSpec::Compound(c)),
            Err(e) => {
                if let Some(e) = attempt(e) {
                    return Err(e);
                }
            }
        }
        LinguisticPerturbation::deserialize(&v)
            .map(MrSpec::Linguistic)
            .map_err(|e| match attempt(e) {
                Some(e) => e,
                None => D::Error::custom(format!("unknown perturbation kind `{kind}`")),
            })
    }
}

/// What linguistic perturbations need besides the seed itself.
pub struct LinguisticEnv {
    pub language: Language,
    pub lexicon: HomophoneLexicon,
    pub targets: HashSet<String>,
    pub synthesizer: Option<Box<dyn Synthesizer>>,
}

impl LinguisticEnv {
    pub fn new(language: Language) -> Self {
        let lexicon = match language {
            Language::En => HomophoneLexicon::english_default(),
            Language::Zh => HomophoneLexicon::new(Language::Zh),
        };
        Self {
            language,
            lexicon,
            targets: HashSet::new(),
            synthesizer: None,
        }
    }
}

/// A perturbed artifact and the words it carries, when known.
#[derive(Debug, Clone, PartialEq)]
pub struct Generated {
    pub audio: AudioBuffer,
    pub transcript: Option<Transcript>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Applied {
    Generated(Generated),
    /// The perturbation has nothing to act on for this seed, e.g. no target
    /// word in its transcript.
    NotApplicable(String),
}

impl MrSpec {
    pub fn name(&self) -> &'static str {
        match self {
            MrSpec::Basic(b) => b.name(),
            MrSpec::Compound(c) => c.name(),
            MrSpec::Linguistic(l) => l.name(),
        }
    }

    pub fn apply(&self, audio: &AudioBuffer, transcript: Option<&Transcript>, env: &LinguisticEnv) -> Result<Applied> {
        // Signal-level changes keep the words but not their timing.
        let words = || transcript.map(|t| Transcript::new(t.tokens.clone(), t.language));
        let l = match self {
            MrSpec::Basic(b) => {
                return Ok(Applied::Generated(Generated {
                    audio: b.apply(audio)?,
                    transcript: words(),
                }))
            }
            MrSpec::Compound(c) => {
                return Ok(Applied::Generated(Generated {
                    audio: c.apply(audio)?,
                    transcript: words(),
                }))
            }
            MrSpec::Linguistic(l) => l,
        };
        let Some(t) = transcript else {
            return Ok(Applied::NotApplicable("seed has no transcript".into()));
        };
        let voice = |text: Transcript| -> Result<Applied> {
            let synth = env
                .synthesizer
                .as_ref()
                .ok_or_else(|| HarnessError::Config(format!("`{}` needs a `tts` section", l.name())))?;
            Ok(Applied::Generated(Generated {
                audio: synth.synthesize(&text)?,
                transcript: Some(text),
            }))
        };
        match l {
            LinguisticPerturbation::HomophoneSubstitution { seed } => {
                let (text, tally) = homophone_substitute(t, &env.lexicon, &env.targets, *seed)?;
                if tally.substituted == 0 {
                    return Ok(Applied::NotApplicable("no target word with a lexicon entry".into()));
                }
                voice(Transcript::new(text.tokens, text.language))
            }
            LinguisticPerturbation::DiscontinuityText { marker, repeats } => {
                if discontinuity_sites(t, &env.targets).is_empty() {
                    return Ok(Applied::NotApplicable("no word precedes a target".into()));
                }
                voice(benign_discontinuity_text(t, &env.targets, marker, *repeats)?)
            }
            LinguisticPerturbation::DiscontinuityAudio { gap_s, repeats } => {
                if t.alignment.is_none() {
                    return Ok(Applied::NotApplicable("seed transcript has no alignment".into()));
                }
                if discontinuity_sites(t, &env.targets).is_empty() {
                    return Ok(Applied::NotApplicable("no word precedes a target".into()));
                }
                Ok(Applied::Generated(Generated {
                    audio: benign_discontinuity_audio(audio, t, &env.targets, *gap_s, *repeats)?,
                    transcript: Some(benign_discontinuity_text(t, &env.targets, "...", *repeats)?),
                }))
            }
        }
    }
}
