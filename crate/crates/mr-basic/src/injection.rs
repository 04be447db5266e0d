use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sonomorph_audio::{rms_total, AudioBuffer};

use crate::{param_err, MrError, Result};

/// `len` standard-normal draws from a ChaCha8 stream keyed by `seed`.
pub fn gaussian_noise(len: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// Gaussian white noise shaped like `x`, scaled so that its RMS is
/// `rms(x) / 10^(target_snr_db / 20)`. Channels draw consecutive segments of
/// the same seeded stream.
pub fn scaled_noise(x: &AudioBuffer, target_snr_db: f64, seed: u64) -> Result<AudioBuffer> {
    if !target_snr_db.is_finite() {
        return Err(param_err("target SNR must be finite"));
    }
    let signal_rms =
        rms_total(x).map_err(|_| MrError::Domain("noise injection on an empty clip".into()))?;
    if signal_rms == 0.0 {
        return Err(MrError::Domain("SNR is undefined for a silent clip".into()));
    }
    let noise = gaussian_noise(x.frames() * x.channel_count(), seed);
    let noise_rms = (noise.iter().map(|v| v * v).sum::<f64>() / noise.len() as f64).sqrt();
    let k = signal_rms / 10f64.powf(target_snr_db / 20.0) / noise_rms;
    let channels = noise
        .chunks_exact(x.frames())
        .map(|seg| seg.iter().map(|v| k * v).collect())
        .collect();
    Ok(AudioBuffer::new(channels, x.sample_rate())?)
}

/// `clamp(x + n)` with `n` from [`scaled_noise`].
pub fn inject_noise(x: &AudioBuffer, target_snr_db: f64, seed: u64) -> Result<AudioBuffer> {
    let noise = scaled_noise(x, target_snr_db, seed)?;
    Ok(x.overlay(&noise, 0, 1.0)?.clamped())
}

/// Duplicates `[start_s, end_s)` `count` extra times directly after itself.
pub fn repeat_segment(x: &AudioBuffer, start_s: f64, end_s: f64, count: usize) -> Result<AudioBuffer> {
    if count < 1 {
        return Err(param_err("repeat count must be at least 1"));
    }
    if !(start_s >= 0.0 && start_s < end_s && end_s <= x.duration_s() + 1e-9) {
        return Err(param_err(format!(
            "repeat window [{start_s}, {end_s}) not inside the {} s clip",
            x.duration_s()
        )));
    }
    let start = x.frames_for(start_s);
    let end = x.frames_for(end_s).min(x.frames());
    if start >= end {
        return Err(param_err("repeat window is shorter than one frame"));
    }
    Ok(x.map_channels(|c| {
        let mut out = Vec::with_capacity(c.len() + count * (end - start));
        out.extend_from_slice(&c[..end]);
        for _ in 0..count {
            out.extend_from_slice(&c[start..end]);
        }
        out.extend_from_slice(&c[end..]);
        out
    })?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sonomorph_audio::measure_snr;

    const RATE: u32 = 16_000;

    #[test]
    fn noise_rms_for_unit_signal_at_20_db() {
        let x = AudioBuffer::mono(vec![1.0, -1.0].repeat(4_000), RATE).unwrap();
        let n = scaled_noise(&x, 20.0, 3).unwrap();
        let noise_rms = sonomorph_audio::rms(&n).unwrap()[0];
        assert!((noise_rms - 0.1).abs() < 1e-12, "{noise_rms}");
    }

    #[test]
    fn same_seed_same_output() {
        let x = AudioBuffer::sine(300.0, 0.3, 0.2, RATE).unwrap();
        assert_eq!(inject_noise(&x, 10.0, 9).unwrap(), inject_noise(&x, 10.0, 9).unwrap());
        assert_ne!(inject_noise(&x, 10.0, 9).unwrap(), inject_noise(&x, 10.0, 10).unwrap());
    }

    #[test]
    fn measured_snr_close_to_target() {
        let x = AudioBuffer::sine(300.0, 0.3, 1.0, RATE).unwrap();
        for target in [6.0, 12.0, 20.0] {
            let y = inject_noise(&x, target, 1).unwrap();
            let snr = measure_snr(&x, &y).unwrap().db().unwrap();
            assert!((snr - target).abs() <= 1.0, "{target}: {snr}");
        }
    }

    #[test]
    fn silent_input_is_domain_error() {
        let x = AudioBuffer::silence(1, 100, RATE).unwrap();
        assert!(matches!(inject_noise(&x, 10.0, 1), Err(MrError::Domain(_))));
    }

    #[test]
    fn repeat_extends_duration() {
        let x = AudioBuffer::sine(100.0, 0.3, 2.0, RATE).unwrap();
        let y = repeat_segment(&x, 0.5, 1.0, 1).unwrap();
        assert_eq!(y.duration_s(), 2.5);
        let (s, e) = (8_000, 16_000);
        assert_eq!(&y.channel(0)[e..e + (e - s)], &x.channel(0)[s..e]);
    }

    #[test]
    fn repeat_preserves_outside_span() {
        let s: Vec<f64> = (0..4_000u64)
            .map(|i| ((i.wrapping_mul(40_503) % 997) as f64 / 498.5) - 1.0)
            .collect();
        let x = AudioBuffer::mono(s.clone(), RATE).unwrap();
        let (start, end, count) = (1_000, 1_600, 3);
        let y = repeat_segment(&x, 1_000.0 / 16_000.0, 1_600.0 / 16_000.0, count).unwrap();
        let added = count * (end - start);
        assert_eq!(y.frames(), s.len() + added);
        assert_eq!(&y.channel(0)[..end], &s[..end]);
        assert_eq!(&y.channel(0)[end + added..], &s[end..]);
        for k in 0..count {
            let at = end + k * (end - start);
            assert_eq!(&y.channel(0)[at..at + end - start], &s[start..end]);
        }
    }

    #[test]
    fn repeat_rejects_bad_windows() {
        let x = AudioBuffer::sine(100.0, 0.3, 1.0, RATE).unwrap();
        assert!(repeat_segment(&x, 0.2, 0.4, 0).is_err());
        assert!(repeat_segment(&x, 0.4, 0.2, 1).is_err());
        assert!(repeat_segment(&x, 0.4, 1.2, 1).is_err());
        assert!(repeat_segment(&x, -0.1, 0.2, 1).is_err());
    }
}
