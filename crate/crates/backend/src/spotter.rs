//! Keyword spotting by template matching: DTW over MFCC cepstra 1..12, slid
//! across the clip. Coefficient 0 carries frame energy and is left out, which
//! makes the distance insensitive to overall gain.

use std::path::Path;

use sonomorph_audio::{read_wav, AudioBuffer};
use sonomorph_linguistic::Transcript;

use crate::exec::{self, Execution};
use crate::mfcc::{MfccExtractor, HOP_S, N_MFCC};
use crate::{dtw_distance, BackendError, Category, ModerationBackend, Result, Verdict};

pub const N_CEPSTRA: usize = N_MFCC - 1;
pub type Cepstra = [f64; N_CEPSTRA];

/// MFCC vectors with coefficient 0 removed.
pub fn spotting_features(extractor: &MfccExtractor, audio: &AudioBuffer) -> Result<Vec<Cepstra>> {
    Ok(extractor
        .extract(audio)?
        .into_iter()
        .map(|v| {
            let mut c = [0.0; N_CEPSTRA];
            c.copy_from_slice(&v[1..]);
            c
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Template {
    pub tag: Category,
    pub word: String,
    pub features: Vec<Cepstra>,
}

/// Best match of a clip against a template set.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub tag: Category,
    pub word: String,
    pub distance: f64,
    /// Offset of the best-matching window, seconds.
    pub start_s: f64,
}

/// Slides a window over `clip` and returns the closest template window.
///
/// The window is `window_s` long when given (an error if the clip is
/// shorter), otherwise each template's own length, shrunk to the whole clip
/// when the template is longer. Windows advance by `hop_s`, and the final
/// window is always aligned with the clip's end.
pub fn nearest_template(
    clip: &[Cepstra],
    templates: &[Template],
    window_s: Option<f64>,
    hop_s: f64,
) -> Result<Detection> {
    if templates.is_empty() {
        return Err(BackendError::Config("no spotter templates".into()));
    }
    if clip.is_empty() {
        return Err(BackendError::Domain("clip has no feature frames".into()));
    }
    if !(hop_s.is_finite() && hop_s > 0.0) {
        return Err(BackendError::Config(format!("window hop {hop_s} s must be positive")));
    }
    let hop = ((hop_s / HOP_S).round() as usize).max(1);
    let fixed = match window_s {
        Some(w) => {
            let frames = (w / HOP_S).round() as usize;
            if !(w.is_finite() && frames >= 1) {
                return Err(BackendError::Config(format!("window {w} s is too short")));
            }
            if frames > clip.len() {
                return Err(BackendError::Domain(format!(
                    "window of {frames} frames is longer than the {}-frame clip",
                    clip.len()
                )));
            }
            Some(frames)
        }
        None => None,
    };
    let mut best: Option<Detection> = None;
    for t in templates {
        let w = fixed.unwrap_or(t.features.len()).min(clip.len());
        let last = clip.len() - w;
        let mut starts: Vec<usize> = (0..=last).step_by(hop).collect();
        if starts.last() != Some(&last) {
            starts.push(last);
        }
        for s in starts {
            let d = dtw_distance(&clip[s..s + w], &t.features)?;
            if best.as_ref().map_or(true, |b| d < b.distance) {
                best = Some(Detection {
                    tag: t.tag,
                    word: t.word.clone(),
                    distance: d,
                    start_s: s as f64 * HOP_S,
                });
            }
        }
    }
    Ok(best.expect("at least one window per template"))
}

/// Thresholded decision: the best template's tag when its distance is below
/// `threshold`, else non-toxic. Confidence is `1 - distance / threshold`,
/// clamped to `[0, 1]`.
pub fn decide(detection: &Detection, threshold: f64) -> Verdict {
    let confidence = (1.0 - detection.distance / threshold).clamp(0.0, 1.0);
    let category = if detection.distance < threshold {
        detection.tag
    } else {
        Category::NonToxic
    };
    Verdict {
        category,
        confidence: Some(confidence),
        raw: Some(serde_json::json!({
            "word": detection.word,
            "distance": detection.distance,
            "start_s": detection.start_s,
        })),
    }
}

/// Parses a template file stem `<tag>__<word>`.
pub fn parse_template_name(stem: &str) -> Result<(Category, String)> {
    let (tag, word) = stem
        .split_once("__")
        .ok_or_else(|| BackendError::Config(format!("template `{stem}` is not named <tag>__<word>")))?;
    let tag: Category = tag
        .parse()
        .map_err(|_| BackendError::Config(format!("template `{stem}` has unknown tag `{tag}`")))?;
    if !tag.is_toxic() || word.is_empty() {
        return Err(BackendError::Config(format!("template `{stem}` must name a toxic tag and a word")));
    }
    Ok((tag, word.to_string()))
}

/// The local reference system under test.
pub struct KeywordSpotter {
    name: String,
    extractor: MfccExtractor,
    templates: Vec<Template>,
    /// `None` until calibrated; moderation refuses to run without it.
    pub threshold: Option<f64>,
    pub window_s: Option<f64>,
    pub hop_s: f64,
}

impl KeywordSpotter {
    pub const DEFAULT_HOP_S: f64 = 0.02;

    /// Builds templates from `(tag, word, audio)` triples sharing one rate.
    pub fn from_clips(name: impl Into<String>, clips: Vec<(Category, String, AudioBuffer)>) -> Result<Self> {
        let rate = clips
            .first()
            .map(|c| c.2.sample_rate())
            .ok_or_else(|| BackendError::Config("no spotter templates".into()))?;
        let extractor = MfccExtractor::new(rate);
        let templates = clips
            .into_iter()
            .map(|(tag, word, audio)| {
                if !tag.is_toxic() {
                    return Err(BackendError::Config(format!("template `{word}` is tagged non_toxic")));
                }
                Ok(Template {
                    tag,
                    features: spotting_features(&extractor, &audio)?,
                    word,
                })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            name: name.into(),
            extractor,
            templates,
            threshold: None,
            window_s: None,
            hop_s: Self::DEFAULT_HOP_S,
        })
    }

    /// Loads every `<tag>__<word>.wav` in `dir`, in file-name order.
    pub fn load(name: impl Into<String>, dir: impl AsRef<Path>) -> Result<Self> {
        let mut paths: Vec<_> = std::fs::read_dir(dir.as_ref())?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        paths.retain(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("wav")));
        paths.sort();
        let clips = paths
            .iter()
            .map(|p| {
                let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default();
                let (tag, word) = parse_template_name(stem)?;
                Ok((tag, word, read_wav(p)?))
            })
            .collect::<Result<Vec<_>>>()?;
        if clips.is_empty() {
            return Err(BackendError::Config(format!("no templates in {}", dir.as_ref().display())));
        }
        Self::from_clips(name, clips)
    }

    pub fn with_threshold(mut self, threshold: f64) -> Result<Self> {
        if !(threshold.is_finite() && threshold > 0.0) {
            return Err(BackendError::Config(format!("threshold {threshold} must be positive")));
        }
        self.threshold = Some(threshold);
        Ok(self)
    }

    pub fn templates(&self) -> &[Template] {
        &self.templates
    }

    pub fn sample_rate(&self) -> u32 {
        self.extractor.sample_rate()
    }

    /// Closest template window for `audio`, before thresholding.
    pub fn detect(&self, audio: &AudioBuffer) -> Result<Detection> {
        let features = spotting_features(&self.extractor, audio)?;
        nearest_template(&features, &self.templates, self.window_s, self.hop_s)
    }

    pub fn detect_batch(&self, clips: &[AudioBuffer], exec: Execution) -> Vec<Result<Detection>> {
        exec::map(clips, exec, |c| self.detect(c))
    }

    pub fn moderate_batch(&self, clips: &[AudioBuffer], exec: Execution) -> Vec<Result<Verdict>> {
        exec::map(clips, exec, |c| self.moderate(c, None))
    }
}

impl ModerationBackend for KeywordSpotter {
    fn name(&self) -> &str {
        &self.name
    }

    fn moderate(&self, audio: &AudioBuffer, _hint: Option<&Transcript>) -> Result<Verdict> {
        let threshold = self
            .threshold
            .ok_or_else(|| BackendError::Config(format!("spotter `{}` has no calibrated threshold", self.name)))?;
        Ok(decide(&self.detect(audio)?, threshold))
    }
}
