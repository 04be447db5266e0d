use std::f64::consts::PI;

use sonomorph_audio::AudioBuffer;
use sonomorph_mr_basic::{db_to_linear, scale};

use crate::{param_err, Result};

/// First-order (6 dB/octave) low-pass at `cutoff_hz`, applied per channel.
pub fn low_pass(x: &AudioBuffer, cutoff_hz: f64) -> Result<AudioBuffer> {
    let a = 1.0 - (-2.0 * PI * cutoff_hz / f64::from(x.sample_rate())).exp();
    Ok(x.map_channels(|c| {
        let mut y = 0.0;
        c.iter()
            .map(|s| {
                y += a * (s - y);
                y
            })
            .collect()
    })?)
}

/// `clamp(x + g·LPF(x))` with `g = 10^(gain_db/20)`.
pub fn bass_boost(x: &AudioBuffer, cutoff_hz: f64, gain_db: f64) -> Result<AudioBuffer> {
    if !(20.0..=400.0).contains(&cutoff_hz) {
        return Err(param_err(format!("cutoff {cutoff_hz} Hz outside [20, 400]")));
    }
    if !(gain_db.is_finite() && gain_db.abs() <= 40.0) {
        return Err(param_err(format!("boost {gain_db} dB outside [-40, 40]")));
    }
    let bass = scale(&low_pass(x, cutoff_hz)?, db_to_linear(gain_db));
    Ok(x.overlay(&bass, 0, 1.0)?.clamped())
}

#[cfg(test)]
mod tests {
    use super::*;

    const RATE: u32 = 16_000;

    /// Peak over the second half, after the filter transient.
    fn settled_peak(b: &AudioBuffer) -> f64 {
        let half = b.frames() / 2;
        b.channel(0)[half..].iter().fold(0.0_f64, |m, s| m.max(s.abs()))
    }

    #[test]
    fn low_tone_is_boosted() {
        let x = AudioBuffer::sine(50.0, 0.3, 1.0, RATE).unwrap();
        let y = bass_boost(&x, 200.0, 6.0).unwrap();
        let g = db_to_linear(6.0);
        let ratio = settled_peak(&y) / settled_peak(&x);
        assert!((ratio / (1.0 + g) - 1.0).abs() <= 0.10, "{ratio}");
    }

    #[test]
    fn high_tone_passes() {
        let x = AudioBuffer::sine(4_000.0, 0.3, 1.0, RATE).unwrap();
        let y = bass_boost(&x, 200.0, 6.0).unwrap();
        let db = 20.0 * (settled_peak(&y) / settled_peak(&x)).log10();
        assert!(db.abs() <= 1.0, "{db}");
    }

    #[test]
    fn silence_stays_silent() {
        let x = AudioBuffer::silence(1, 100, RATE).unwrap();
        assert_eq!(bass_boost(&x, 200.0, 0.0).unwrap(), x);
    }

    #[test]
    fn rejects_out_of_band_cutoff() {
        let x = AudioBuffer::silence(1, 10, RATE).unwrap();
        assert!(bass_boost(&x, 10.0, 6.0).is_err());
        assert!(bass_boost(&x, 500.0, 6.0).is_err());
        assert!(bass_boost(&x, 200.0, f64::NEG_INFINITY).is_err());
    }
}
