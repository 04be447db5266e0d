use std::collections::BTreeMap;
use std::path::Path;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sonomorph_audio::{content_digest, AudioBuffer};
use sonomorph_linguistic::Transcript;

use crate::{BackendError, Category, ModerationBackend, Result, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureEntry {
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
}

/// Replays recorded verdicts, keyed by the content digest of the audio.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FixtureBackend {
    name: String,
    entries: BTreeMap<String, FixtureEntry>,
}

impl FixtureBackend {
    pub fn new(name: impl Into<String>, entries: BTreeMap<String, FixtureEntry>) -> Self {
        Self {
            name: name.into(),
            entries,
        }
    }

    pub fn parse(name: impl Into<String>, json: &str) -> Result<Self> {
        let entries: BTreeMap<String, FixtureEntry> =
            serde_json::from_str(json).map_err(|e| BackendError::Config(format!("fixture file: {e}")))?;
        for (digest, e) in &entries {
            if let Some(c) = e.confidence {
                if !(0.0..=1.0).contains(&c) {
                    return Err(BackendError::Config(format!("{digest}: confidence {c} outside [0, 1]")));
                }
            }
        }
        Ok(Self::new(name, entries))
    }

    pub fn load(name: impl Into<String>, path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(name, &std::fs::read_to_string(path)?)
    }

    /// Pretty JSON with keys in digest order, so saved fixtures diff cleanly.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.entries).expect("fixture entries serialize")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        Ok(std::fs::write(path, self.to_json() + "\n")?)
    }

    pub fn insert(&mut self, digest: String, entry: FixtureEntry) {
        self.entries.insert(digest, entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, digest: &str) -> Result<Verdict> {
        let e = self
            .entries
            .get(digest)
            .ok_or_else(|| BackendError::MissingFixture(digest.to_string()))?;
        Verdict::new(e.category, e.confidence)
    }
}

impl ModerationBackend for FixtureBackend {
    fn name(&self) -> &str {
        &self.name
    }

    fn moderate(&self, audio: &AudioBuffer, _hint: Option<&Transcript>) -> Result<Verdict> {
        self.lookup(&content_digest(audio))
    }
}

/// Passes calls through to another backend and remembers every answer, so a
/// live run can be frozen into a [`FixtureBackend`].
pub struct Recorder {
    inner: Arc<dyn ModerationBackend>,
    seen: Mutex<BTreeMap<String, FixtureEntry>>,
}

impl Recorder {
    pub fn new(inner: Arc<dyn ModerationBackend>) -> Self {
        Self {
            inner,
            seen: Mutex::new(BTreeMap::new()),
        }
    }

    pub fn fixture(&self) -> FixtureBackend {
        let seen = self.seen.lock().unwrap_or_else(|p| p.into_inner());
        FixtureBackend::new(self.inner.name(), seen.clone())
    }
}

impl ModerationBackend for Recorder {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn moderate(&self, audio: &AudioBuffer, hint: Option<&Transcript>) -> Result<Verdict> {
        let v = self.inner.moderate(audio, hint)?;
        let entry = FixtureEntry {
            category: v.category,
            confidence: v.confidence,
        };
        self.seen
            .lock()
            .unwrap_or_else(|p| p.into_inner())
            .insert(content_digest(audio), entry);
        Ok(v)
    }
}
