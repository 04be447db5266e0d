use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sonomorph_backend::{BackendConfig, Category};
use sonomorph_linguistic::tts::{CommandSynth, Synthesizer, WordBank};
use sonomorph_linguistic::{parse_corpus, parse_stopwords, select_keywords, HomophoneLexicon, Language};

use crate::mr::{LinguisticEnv, MrSpec};
use crate::{HarnessError, Result};

/// A campaign, as written in its JSON config file. Relative paths resolve
/// against the directory holding the config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CampaignConfig {
    pub seeds: Vec<SeedSpec>,
    pub mrs: Vec<MrEntry>,
    pub backends: Vec<BackendConfig>,
    #[serde(default)]
    pub language: Language,
    /// Extra homophone entries; English campaigns start from the built-in set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lexicon: Option<PathBuf>,
    /// Words the linguistic perturbations act on.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub targets: Vec<String>,
    /// Adds the top TF-IDF words of a corpus to `targets`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub keyword_selection: Option<KeywordSelection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tts: Option<TtsConfig>,
    #[serde(default = "default_workers")]
    pub workers: usize,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
}

fn default_workers() -> usize {
    4
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeedSpec {
    pub id: String,
    pub audio: PathBuf,
    /// Token-per-line transcript, optionally with alignment columns.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<PathBuf>,
    pub category: Category,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MrEntry {
    /// Report label; defaults to the perturbation kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub mr: MrSpec,
}

impl MrEntry {
    pub fn label(&self) -> &str {
        self.name.as_deref().unwrap_or(self.mr.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeywordSelection {
    pub corpus: PathBuf,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopwords: Option<PathBuf>,
    pub k: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TtsConfig {
    /// Directory of `<word>.wav` recordings.
    WordBank {
        dir: PathBuf,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        word_gap_s: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        pause_s: Option<f64>,
    },
    /// External program; `{text}` and `{out}` in `args` are substituted.
    Command { program: String, args: Vec<String> },
}

impl CampaignConfig {
    pub fn parse(json: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(json).map_err(|e| HarnessError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config; returns it with its base directory.
    pub fn load(path: impl AsRef<Path>) -> Result<(Self, PathBuf)> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        let config = Self::parse(&text)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let base = if base.as_os_str().is_empty() { PathBuf::from(".") } else { base };
        Ok((config, std::fs::canonicalize(&base)?))
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |m: String| Err(HarnessError::Config(m));
        if self.seeds.is_empty() {
            return cfg("`seeds` must list at least one seed".into());
        }
        if self.mrs.is_empty() {
            return cfg("`mrs` must list at least one perturbation".into());
        }
        if self.backends.is_empty() {
            return cfg("`backends` must list at least one backend".into());
        }
        if self.workers == 0 {
            return cfg("`workers` must be at least 1".into());
        }
        let mut ids = HashSet::new();
        for s in &self.seeds {
            if !ids.insert(s.id.as_str()) {
                return cfg(format!("duplicate seed id `{}`", s.id));
            }
            if !s.category.is_toxic() {
                return cfg(format!("seed `{}` must declare a toxic category", s.id));
            }
        }
        let mut names = HashSet::new();
        for m in &self.mrs {
            if !names.insert(m.label()) {
                return cfg(format!("duplicate perturbation name `{}`; set distinct `name`s", m.label()));
            }
        }
        let mut backends = HashSet::new();
        for b in &self.backends {
            if !backends.insert(b.name()) {
                return cfg(format!("duplicate backend name `{}`", b.name()));
            }
        }
        let linguistic: Vec<_> = self
            .mrs
            .iter()
            .filter_map(|m| match &m.mr {
                MrSpec::Linguistic(l) => Some(l),
                _ => None,
            })
            .collect();
        if !linguistic.is_empty() && self.targets.is_empty() && self.keyword_selection.is_none() {
            return cfg("linguistic perturbations need `targets` or `keyword_selection`".into());
        }
        if linguistic.iter().any(|l| l.needs_synthesizer()) && self.tts.is_none() {
            return cfg("text-level linguistic perturbations need a `tts` section".into());
        }
        Ok(())
    }

    /// Loads lexicon, targets and synthesizer.
    pub fn linguistic_env(&self, base_dir: &Path) -> Result<LinguisticEnv> {
        let mut env = LinguisticEnv::new(self.language);
        if let Some(p) = &self.lexicon {
            env.lexicon.extend(HomophoneLexicon::load(base_dir.join(p), self.language)?)?;
        }
        env.targets = self.targets.iter().map(|t| self.language.normalize(t)).collect();
        if let Some(ks) = &self.keyword_selection {
            let corpus = parse_corpus(&std::fs::read_to_string(base_dir.join(&ks.corpus))?, self.language);
            let stop = match &ks.stopwords {
                Some(p) => parse_stopwords(&std::fs::read_to_string(base_dir.join(p))?, self.language),
                None => HashSet::new(),
            };
            env.targets
                .extend(select_keywords(&corpus, &stop, ks.k)?.into_iter().map(|k| k.token));
        }
        env.synthesizer = match &self.tts {
            None => None,
            Some(TtsConfig::WordBank { dir, word_gap_s, pause_s }) => {
                let mut bank = WordBank::load(base_dir.join(dir), self.language)?;
                if let Some(g) = word_gap_s {
                    bank.word_gap_s = *g;
                }
                if let Some(p) = pause_s {
                    bank.pause_s = *p;
                }
                Some(Box::new(bank) as Box<dyn Synthesizer>)
            }
            Some(TtsConfig::Command { program, args }) => Some(Box::new(CommandSynth {
                program: program.clone(),
                args: args.clone(),
            })),
        };
        Ok(env)
    }
}
