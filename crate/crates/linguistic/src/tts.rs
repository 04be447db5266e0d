//! Speech synthesis hooks for perturbed text. Nothing here models speech;
//! a [`Synthesizer`] is whatever turns a transcript back into audio, be it a
//! bank of recorded words or an external TTS program.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::Command;

use sonomorph_audio::{read_wav, AudioBuffer};

use crate::{is_marker, Language, LinguisticError, Result, Transcript};

pub trait Synthesizer: Send + Sync {
    fn name(&self) -> &str;
    fn synthesize(&self, transcript: &Transcript) -> Result<AudioBuffer>;
}

/// Concatenates pre-recorded words. Marker tokens become `pause_s` of
/// silence; words are separated by `word_gap_s`.
#[derive(Debug, Clone)]
pub struct WordBank {
    words: HashMap<String, AudioBuffer>,
    language: Language,
    sample_rate: u32,
    pub word_gap_s: f64,
    pub pause_s: f64,
}

impl WordBank {
    pub fn new(language: Language, sample_rate: u32) -> Self {
        Self {
            words: HashMap::new(),
            language,
            sample_rate,
            word_gap_s: 0.08,
            pause_s: 0.3,
        }
    }

    pub fn insert(&mut self, word: &str, audio: AudioBuffer) -> Result<()> {
        if audio.sample_rate() != self.sample_rate {
            return Err(LinguisticError::Domain(format!(
                "`{word}` is sampled at {} Hz, bank at {} Hz",
                audio.sample_rate(),
                self.sample_rate
            )));
        }
        self.words.insert(self.language.normalize(word), audio.to_mono());
        Ok(())
    }

    /// Loads every `<word>.wav` in `dir`. The sample rate of the first file
    /// read fixes the bank's rate.
    pub fn load(dir: impl AsRef<Path>, language: Language) -> Result<Self> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(dir.as_ref())?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")));
        paths.sort();
        let mut bank: Option<WordBank> = None;
        for p in paths {
            let audio = read_wav(&p)?;
            let word = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            let bank = bank.get_or_insert_with(|| WordBank::new(language, audio.sample_rate()));
            bank.insert(&word, audio)?;
        }
        bank.ok_or_else(|| {
            LinguisticError::Domain(format!("no .wav words in {}", dir.as_ref().display()))
        })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains_key(&self.language.normalize(word))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

impl Synthesizer for WordBank {
    fn name(&self) -> &str {
        "word_bank"
    }

    fn synthesize(&self, transcript: &Transcript) -> Result<AudioBuffer> {
        let silence = |s: f64| {
            let n = (s * f64::from(self.sample_rate)).round() as usize;
            AudioBuffer::silence(1, n, self.sample_rate)
        };
        let gap = silence(self.word_gap_s)?;
        let pause = silence(self.pause_s)?;
        let mut pieces = Vec::with_capacity(transcript.len() * 2);
        for (i, token) in transcript.tokens.iter().enumerate() {
            if is_marker(token) {
                pieces.push(pause.clone());
                continue;
            }
            if i > 0 && !is_marker(&transcript.tokens[i - 1]) {
                pieces.push(gap.clone());
            }
            let word = self
                .words
                .get(&self.language.normalize(token))
                .ok_or_else(|| LinguisticError::Synthesis(format!("no recording for `{token}`")))?;
            pieces.push(word.clone());
        }
        if pieces.is_empty() {
            return Ok(AudioBuffer::silence(1, 0, self.sample_rate)?);
        }
        Ok(AudioBuffer::concat(&pieces)?)
    }
}

/// Runs an external program per utterance. `{text}` and `{out}` in the
/// arguments are replaced by the rendered text and the WAV path the program
/// must write.
#[derive(Debug, Clone)]
pub struct CommandSynth {
    pub program: String,
    pub args: Vec<String>,
}

impl Synthesizer for CommandSynth {
    fn name(&self) -> &str {
        &self.program
    }

    fn synthesize(&self, transcript: &Transcript) -> Result<AudioBuffer> {
        let dir = tempfile::tempdir()?;
        let out = dir.path().join("utterance.wav");
        let text = transcript.render();
        let out_str = out.to_string_lossy();
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| a.replace("{text}", &text).replace("{out}", &out_str))
            .collect();
        let status = Command::new(&self.program)
            .args(&args)
            .output()
            .map_err(|e| LinguisticError::Synthesis(format!("cannot run `{}`: {e}", self.program)))?;
        if !status.status.success() {
            return Err(LinguisticError::Synthesis(format!(
                "`{}` exited with {}: {}",
                self.program,
                status.status,
                String::from_utf8_lossy(&status.stderr).trim()
            )));
        }
        Ok(read_wav(&out)?)
    }
}
