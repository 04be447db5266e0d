use sonomorph_audio::dsp::convolve;
use sonomorph_audio::AudioBuffer;
use sonomorph_mr_basic::gaussian_noise;

use crate::{param_err, Result};

/// Impulse response: a unit direct tap followed by `round(duration_s·rate)`
/// taps of seeded Gaussian noise under an exponential envelope that falls
/// 60 dB over `duration_s`. The noise tail is normalized to unit energy and
/// then scaled by `intensity`, so `intensity` is the wet/dry amplitude ratio.
pub fn impulse_response(intensity: f64, duration_s: f64, seed: u64, sample_rate: u32) -> Vec<f64> {
    let len = (duration_s * f64::from(sample_rate)).round() as usize;
    let mut h = Vec::with_capacity(len + 1);
    h.push(1.0);
    if len == 0 {
        return h;
    }
    let rate = f64::from(sample_rate);
    let tail: Vec<f64> = gaussian_noise(len, seed)
        .into_iter()
        .enumerate()
        .map(|(i, v)| v * 10f64.powf(-3.0 * (i + 1) as f64 / rate / duration_s))
        .collect();
    let energy: f64 = tail.iter().map(|v| v * v).sum();
    let k = if energy > 0.0 { intensity / energy.sqrt() } else { 0.0 };
    h.extend(tail.into_iter().map(|v| v * k));
    h
}

/// Convolution with [`impulse_response`]; the output has
/// `frames + len(h) - 1` frames.
pub fn reverb(x: &AudioBuffer, intensity: f64, duration_s: f64, seed: u64) -> Result<AudioBuffer> {
    if !(intensity.is_finite() && intensity >= 0.0) {
        return Err(param_err(format!("reverb intensity {intensity} must be non-negative")));
    }
    if !(duration_s.is_finite() && duration_s >= 0.0) {
        return Err(param_err(format!("reverb duration {duration_s} s must be non-negative")));
    }
    let h = impulse_response(intensity, duration_s, seed, x.sample_rate());
    if x.is_empty() {
        return Ok(x.clone());
    }
    if intensity == 0.0 {
        return Ok(x.with_length(x.frames() + h.len() - 1));
    }
    Ok(x.map_channels(|c| convolve(c, &h))?.clamped())
}
