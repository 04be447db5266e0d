use sonomorph_audio::dsp::interpolate;
use sonomorph_audio::AudioBuffer;

use crate::{param_err, time_stretch, Result};

/// Linear-interpolation resampling that reads the input `ratio` times
/// faster: the result has `round(frames / ratio)` frames and every frequency
/// is multiplied by `ratio` when played at the original rate.
pub fn resample(x: &AudioBuffer, ratio: f64) -> Result<AudioBuffer> {
    if !(ratio.is_finite() && ratio > 0.0) {
        return Err(param_err(format!("resample ratio {ratio} must be positive")));
    }
    let len = (x.frames() as f64 / ratio).round() as usize;
    Ok(x.map_channels(|c| (0..len).map(|i| interpolate(c, i as f64 * ratio)).collect())?)
}

/// Shifts pitch by `semitones` (|s| ≤ 12) while keeping duration: resample by
/// `2^(s/12)`, then stretch back to the original length.
pub fn pitch_shift(x: &AudioBuffer, semitones: f64) -> Result<AudioBuffer> {
    if !(semitones.is_finite() && semitones.abs() <= 12.0) {
        return Err(param_err(format!("pitch shift {semitones} semitones outside [-12, 12]")));
    }
    if semitones == 0.0 || x.is_empty() {
        return Ok(x.clone());
    }
    let ratio = 2f64.powf(semitones / 12.0);
    let shifted = resample(x, ratio)?;
    if shifted.is_empty() {
        return Ok(x.clone());
    }
    let factor = x.frames() as f64 / shifted.frames() as f64;
    Ok(time_stretch(&shifted, factor)?.with_length(x.frames()))
}
