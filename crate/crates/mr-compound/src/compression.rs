use sonomorph_audio::AudioBuffer;
use sonomorph_mr_basic::db_to_linear;

use crate::{param_err, Result};

/// Level above which a full-scale sine reads 0 dB on the RMS detector.
const SINE_REFERENCE_DB: f64 = 3.010_299_956_639_812;

/// Detector and gain-smoothing time constants, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorTiming {
    pub attack_s: f64,
    pub release_s: f64,
}

impl Default for CompressorTiming {
    fn default() -> Self {
        Self {
            attack_s: 0.010,
            release_s: 0.100,
        }
    }
}

fn one_pole(tau_s: f64, rate: f64) -> f64 {
    1.0 - (-1.0 / (tau_s * rate)).exp()
}

/// Static downward compressor.
///
/// The detector is a mean-square average (time constant = attack) of the
/// channel mix, read in dB relative to a full-scale sine. Above
/// `threshold_db` the output level follows `T + (L - T) / ratio`; the gain
/// moves toward that target with the attack constant while reducing and the
/// release constant while recovering.
pub fn compress(x: &AudioBuffer, threshold_db: f64, ratio: f64) -> Result<AudioBuffer> {
    compress_with(x, threshold_db, ratio, CompressorTiming::default())
}

pub fn compress_with(
    x: &AudioBuffer,
    threshold_db: f64,
    ratio: f64,
    timing: CompressorTiming,
) -> Result<AudioBuffer> {
    if !(threshold_db.is_finite() && threshold_db < 0.0) {
        return Err(param_err(format!("threshold {threshold_db} dB must be negative")));
    }
    if !(ratio.is_finite() && ratio >= 1.0) {
        return Err(param_err(format!("ratio {ratio} must be at least 1")));
    }
    let rate = f64::from(x.sample_rate());
    let detect = one_pole(timing.attack_s, rate);
    let attack = one_pole(timing.attack_s, rate);
    let release = one_pole(timing.release_s, rate);

    let mono = x.to_mono();
    let mut mean_square = 0.0;
    let mut gain_db = 0.0;
    let gains: Vec<f64> = mono
        .channel(0)
        .iter()
        .map(|s| {
            mean_square += detect * (s * s - mean_square);
            let level = 10.0 * mean_square.log10() + SINE_REFERENCE_DB;
            let target = if level > threshold_db {
                (level - threshold_db) * (1.0 / ratio - 1.0)
            } else {
                0.0
            };
            let coef = if target < gain_db { attack } else { release };
            gain_db += coef * (target - gain_db);
            if gain_db == 0.0 {
                1.0
            } else {
                db_to_linear(gain_db)
            }
        })
        .collect();
    Ok(x
        .map_channels(|c| c.iter().zip(&gains).map(|(s, g)| s * g).collect())?
        .clamped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sonomorph_audio::AudioBuffer;

    const RATE: u32 = 16_000;

    fn peak_db(x: &[f64]) -> f64 {
        20.0 * x.iter().fold(0.0_f64, |m, s| m.max(s.abs())).log10()
    }

    #[test]
    fn full_scale_sine_settles_at_law() {
        let x = AudioBuffer::sine(440.0, 1.0, 2.0, RATE).unwrap();
        let y = compress(&x, -20.0, 4.0).unwrap();
        let tail = &y.channel(0)[RATE as usize..];
        let p = peak_db(tail);
        assert!((p + 15.0).abs() <= 1.0, "{p}");
    }

    #[test]
    fn below_threshold_is_identity() {
        let x = AudioBuffer::sine(440.0, 0.05, 0.5, RATE).unwrap();
        let y = compress(&x, -20.0, 4.0).unwrap();
        let diff = x
            .channel(0)
            .iter()
            .zip(y.channel(0))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(diff <= 1e-6);
    }

    #[test]
    fn crest_factor_drops_on_speech_like_signal() {
        // Alternating loud and quiet syllables with raised-cosine envelopes.
        let n = 3 * RATE as usize;
        let s: Vec<f64> = (0..n)
            .map(|i| {
                let t = i as f64 / f64::from(RATE);
                let syllable = (t / 0.3).floor() as usize;
                let amp = if syllable % 2 == 0 { 0.9 } else { 0.08 };
                let phase = (t % 0.3) / 0.3;
                let edge = (std::f64::consts::PI * phase).sin().powi(2);
                amp * edge
                    * ((2.0 * std::f64::consts::PI * 180.0 * t).sin()
                        + 0.5 * (2.0 * std::f64::consts::PI * 540.0 * t).sin())
                    / 1.5
            })
            .collect();
        let x = AudioBuffer::mono(s, RATE).unwrap();
        let y = compress(&x, -24.0, 4.0).unwrap();
        let crest = |b: &AudioBuffer| b.peak() / sonomorph_audio::rms_total(b).unwrap();
        assert!(crest(&y) < crest(&x), "{} !< {}", crest(&y), crest(&x));
    }

    #[test]
    fn rejects_invalid_params() {
        let x = AudioBuffer::sine(440.0, 0.5, 0.1, RATE).unwrap();
        assert!(compress(&x, 0.0, 2.0).is_err());
        assert!(compress(&x, -10.0, 0.5).is_err());
    }
}
