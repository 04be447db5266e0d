//! Threshold fitting for the keyword spotter from a labeled corpus.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sonomorph_audio::{read_wav, AudioBuffer};

use crate::exec::Execution;
use crate::spotter::{decide, Detection, KeywordSpotter};
use crate::{BackendError, Category, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub threshold: f64,
    pub fit_clips: usize,
    pub fit_accuracy: f64,
    pub heldout_clips: usize,
    /// `None` when nothing was held out.
    pub heldout_accuracy: Option<f64>,
}

/// Reads `path<TAB>category` lines; relative paths resolve against the
/// listing's directory.
pub fn load_labeled(listing: impl AsRef<Path>) -> Result<Vec<(PathBuf, Category)>> {
    let listing = listing.as_ref();
    let base = listing.parent().unwrap_or(Path::new("."));
    let text = std::fs::read_to_string(listing)?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(i, l)| {
            let (p, c) = l
                .split_once('\t')
                .ok_or_else(|| BackendError::Config(format!("{}:{}: expected path<TAB>category", listing.display(), i + 1)))?;
            let category = c.trim().parse().map_err(|_| {
                BackendError::Config(format!("{}:{}: unknown category `{}`", listing.display(), i + 1, c.trim()))
            })?;
            Ok((base.join(p.trim()), category))
        })
        .collect()
}

pub fn read_labeled(listing: impl AsRef<Path>) -> Result<Vec<(AudioBuffer, Category)>> {
    load_labeled(listing)?
        .into_iter()
        .map(|(p, c)| Ok((read_wav(&p)?, c)))
        .collect()
}

fn accuracy(scored: &[(Detection, Category)], threshold: f64) -> f64 {
    let correct = scored
        .iter()
        .filter(|(d, label)| decide(d, threshold).category == *label)
        .count();
    correct as f64 / scored.len() as f64
}

/// Fits the spotter threshold on a seeded random part of `clips` and
/// reports accuracy on the `holdout` fraction left out.
///
/// Candidates are the midpoints between consecutive distinct best-match
/// distances of the fit clips, plus one below and one above them all. The
/// most accurate candidate wins; ties go to the median tied candidate.
pub fn calibrate(
    spotter: &KeywordSpotter,
    clips: &[(AudioBuffer, Category)],
    holdout: f64,
    seed: u64,
    exec: Execution,
) -> Result<Calibration> {
    if !(0.0..1.0).contains(&holdout) {
        return Err(BackendError::Config(format!("holdout fraction {holdout} outside [0, 1)")));
    }
    let audio: Vec<AudioBuffer> = clips.iter().map(|c| c.0.clone()).collect();
    let detections = spotter.detect_batch(&audio, exec).into_iter().collect::<Result<Vec<_>>>()?;
    let mut scored: Vec<(Detection, Category)> = detections.into_iter().zip(clips.iter().map(|c| c.1)).collect();
    scored.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_held = (holdout * scored.len() as f64).round() as usize;
    let (held, fit) = scored.split_at(n_held.min(scored.len().saturating_sub(1)));
    if fit.is_empty() {
        return Err(BackendError::Domain("calibration needs at least one labeled clip".into()));
    }

    let mut distances: Vec<f64> = fit.iter().map(|(d, _)| d.distance).collect();
    distances.sort_by(f64::total_cmp);
    distances.dedup();
    let mut candidates = Vec::with_capacity(distances.len() + 1);
    if distances[0] > 0.0 {
        candidates.push(distances[0] / 2.0);
    }
    candidates.extend(distances.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    candidates.push(distances[distances.len() - 1] * 1.5 + 1e-9);

    let accs: Vec<f64> = candidates.iter().map(|&t| accuracy(fit, t)).collect();
    let best = accs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<f64> = candidates
        .iter()
        .zip(&accs)
        .filter(|(_, &a)| a == best)
        .map(|(&t, _)| t)
        .collect();
    let threshold = tied[tied.len() / 2];
    Ok(Calibration {
        threshold,
        fit_clips: fit.len(),
        fit_accuracy: best,
        heldout_clips: held.len(),
        heldout_accuracy: (!held.is_empty()).then(|| accuracy(held, threshold)),
    })
}
