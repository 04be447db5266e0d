use sonomorph_audio::dsp::convolve;
use sonomorph_audio::AudioBuffer;

use crate::{param_err, Result};

/// FIR kernel used to add harmonics after clipping.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicKernel(pub Vec<f64>);

impl HarmonicKernel {
    /// `[1, 0, 0.2·drive]`: the dry path plus a two-sample-delayed copy.
    pub fn for_drive(drive: f64) -> Self {
        Self(vec![1.0, 0.0, 0.2 * drive])
    }

    pub fn identity() -> Self {
        Self(vec![1.0])
    }
}

/// Stage one: hard clip at `±threshold`.
pub fn hard_clip(x: &AudioBuffer, threshold: f64) -> AudioBuffer {
    x.map_samples(|s| s.clamp(-threshold, threshold))
}

/// Clip at `±clip_threshold`, convolve with [`HarmonicKernel::for_drive`],
/// then apply a linear gain ramp from 1 to `1 + drive` across the clip.
pub fn distort(x: &AudioBuffer, clip_threshold: f64, drive: f64) -> Result<AudioBuffer> {
    distort_with_kernel(x, clip_threshold, drive, &HarmonicKernel::for_drive(drive))
}

pub fn distort_with_kernel(
    x: &AudioBuffer,
    clip_threshold: f64,
    drive: f64,
    kernel: &HarmonicKernel,
) -> Result<AudioBuffer> {
    if !(clip_threshold > 0.0 && clip_threshold <= 1.0) {
        return Err(param_err(format!("clip threshold {clip_threshold} outside (0, 1]")));
    }
    if !(drive.is_finite() && drive >= 0.0) {
        return Err(param_err(format!("drive {drive} must be non-negative")));
    }
    if kernel.0.is_empty() || kernel.0.iter().any(|k| !k.is_finite()) {
        return Err(param_err("harmonic kernel must be non-empty and finite"));
    }
    let clipped = hard_clip(x, clip_threshold);
    let frames = x.frames();
    let span = frames.saturating_sub(1).max(1) as f64;
    Ok(clipped
        .map_channels(|c| {
            let mut y = convolve(c, &kernel.0);
            y.truncate(frames);
            y.iter()
                .enumerate()
                .map(|(n, s)| s * (1.0 + drive * n as f64 / span))
                .collect()
        })?
        .clamped())
}
