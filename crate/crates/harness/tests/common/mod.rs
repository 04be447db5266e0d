#![allow(dead_code)]

use std::path::Path;
use std::sync::Arc;

use serde_json::json;
use sonomorph_audio::{write_wav, AudioBuffer};
use sonomorph_backend::{BackendError, Category, ModerationBackend, Verdict};
use sonomorph_harness::CampaignConfig;
use sonomorph_linguistic::Transcript;

pub const RATE: u32 = 16_000;

/// Backend answering through a closure over the audio.
pub struct FnBackend<F> {
    name: String,
    f: F,
}

impl<F> ModerationBackend for FnBackend<F>
where
    F: Fn(&AudioBuffer) -> Result<Category, BackendError> + Send + Sync,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn moderate(&self, audio: &AudioBuffer, _hint: Option<&Transcript>) -> Result<Verdict, BackendError> {
        Verdict::new((self.f)(audio)?, None)
    }
}

pub fn backend<F>(name: &str, f: F) -> Arc<dyn ModerationBackend>
where
    F: Fn(&AudioBuffer) -> Result<Category, BackendError> + Send + Sync + 'static,
{
    Arc::new(FnBackend { name: name.into(), f })
}

/// 50 ms of constant level `v`; the level survives 16-bit storage to
/// within 1/32768, so it can label a clip.
pub fn level_clip(v: f64) -> AudioBuffer {
    AudioBuffer::mono(vec![v; 800], RATE).unwrap()
}

pub fn level(audio: &AudioBuffer) -> f64 {
    let c = audio.channel(0);
    c.iter().sum::<f64>() / c.len() as f64
}

/// Seed `i` sits at level `0.4 + 0.001·i`.
pub fn seed_index(audio: &AudioBuffer) -> usize {
    ((level(audio) - 0.4) / 0.001).round() as usize
}

pub fn unavailable() -> BackendError {
    BackendError::Unavailable("scripted outage".into())
}

/// Writes one level clip per category into `dir` and returns a config over
/// them with the given perturbations and backend names.
pub fn level_campaign(dir: &Path, categories: &[Category], mrs: serde_json::Value, backends: &[&str]) -> CampaignConfig {
    let mut seeds = Vec::new();
    for (i, c) in categories.iter().enumerate() {
        let name = format!("seed_{i:03}.wav");
        write_wav(&level_clip(0.4 + 0.001 * i as f64), dir.join(&name), 16).unwrap();
        seeds.push(json!({"id": format!("s{i:03}"), "audio": name, "category": c}));
    }
    let backends: Vec<_> = backends
        .iter()
        .map(|b| json!({"kind": "fixture", "name": b, "path": format!("{b}.json")}))
        .collect();
    let config = json!({"seeds": seeds, "mrs": mrs, "backends": backends, "workers": 3});
    CampaignConfig::parse(&config.to_string()).unwrap()
}
