//! Measurement routines. Transforms never call these; they exist so that
//! tests and reports can check transform outputs independently.

use crate::dsp::{hann, real_magnitudes};
use crate::{AudioBuffer, AudioError, Result};

/// Magnitude spectrum of a Hann-windowed frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub bin_frequencies: Vec<f64>,
    pub magnitudes: Vec<f64>,
    /// Hz per bin, `sample_rate / fft_size`.
    pub resolution: f64,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.magnitudes.is_empty()
    }

    pub fn bin_of(&self, freq_hz: f64) -> usize {
        ((freq_hz / self.resolution).round() as usize).min(self.len().saturating_sub(1))
    }

    /// Largest magnitude within `±width_bins` of `freq_hz`.
    pub fn magnitude_near(&self, freq_hz: f64, width_bins: usize) -> f64 {
        let center = self.bin_of(freq_hz);
        let lo = center.saturating_sub(width_bins);
        let hi = (center + width_bins).min(self.len() - 1);
        self.magnitudes[lo..=hi].iter().copied().fold(0.0, f64::max)
    }

    pub fn argmax(&self) -> usize {
        self.magnitudes
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, &m)| if m > best.1 { (i, m) } else { best })
            .0
    }

    /// Indices of local maxima, strongest first.
    pub fn peaks(&self) -> Vec<usize> {
        let m = &self.magnitudes;
        let mut idx: Vec<usize> = (1..m.len().saturating_sub(1))
            .filter(|&i| m[i] > m[i - 1] && m[i] >= m[i + 1])
            .collect();
        idx.sort_by(|&a, &b| m[b].total_cmp(&m[a]));
        idx
    }
}

/// Per-channel root-mean-square.
pub fn rms(buffer: &AudioBuffer) -> Result<Vec<f64>> {
    if buffer.is_empty() {
        return Err(AudioError::Domain("rms of an empty buffer".into()));
    }
    Ok(buffer.channels().iter().map(|c| slice_rms(c)).collect())
}

/// RMS pooled over all channels.
pub fn rms_total(buffer: &AudioBuffer) -> Result<f64> {
    if buffer.is_empty() {
        return Err(AudioError::Domain("rms of an empty buffer".into()));
    }
    let n = (buffer.frames() * buffer.channel_count()) as f64;
    Ok((buffer.energy() / n).sqrt())
}

pub(crate) fn slice_rms(x: &[f64]) -> f64 {
    (x.iter().map(|s| s * s).sum::<f64>() / x.len() as f64).sqrt()
}

/// Hann-windowed magnitude spectrum of the first `fft_size` frames of the
/// channel mix.
pub fn spectrum(buffer: &AudioBuffer, fft_size: usize) -> Result<Spectrum> {
    if fft_size < 2 || !fft_size.is_power_of_two() {
        return Err(AudioError::Domain(format!("fft size {fft_size} is not a power of two")));
    }
    if buffer.frames() < fft_size {
        return Err(AudioError::Domain(format!(
            "{} frames is shorter than fft size {fft_size}",
            buffer.frames()
        )));
    }
    let mono = buffer.to_mono();
    let frame: Vec<f64> = mono.channel(0)[..fft_size]
        .iter()
        .zip(hann(fft_size))
        .map(|(x, w)| x * w)
        .collect();
    let magnitudes = real_magnitudes(&frame, fft_size);
    let resolution = f64::from(buffer.sample_rate()) / fft_size as f64;
    let bin_frequencies = (0..magnitudes.len()).map(|k| k as f64 * resolution).collect();
    Ok(Spectrum {
        bin_frequencies,
        magnitudes,
        resolution,
    })
}

/// Bin-center frequency of the strongest spectral bin.
pub fn dominant_frequency(buffer: &AudioBuffer, fft_size: usize) -> Result<f64> {
    let s = spectrum(buffer, fft_size)?;
    Ok(s.bin_frequencies[s.argmax()])
}

/// Signal-to-noise ratio of `noisy` against the clean `signal`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Snr {
    Db(f64),
    /// `noisy == signal`; the ratio is unbounded.
    NoNoise,
}

impl Snr {
    pub fn db(self) -> Option<f64> {
        match self {
            Snr::Db(v) => Some(v),
            Snr::NoNoise => None,
        }
    }
}

/// `20 log10(rms(signal) / rms(noisy - signal))`, pooled over channels.
pub fn measure_snr(signal: &AudioBuffer, noisy: &AudioBuffer) -> Result<Snr> {
    if signal.frames() != noisy.frames() || signal.channel_count() != noisy.channel_count() {
        return Err(AudioError::Domain("snr requires buffers of equal shape".into()));
    }
    let signal_rms = rms_total(signal)?;
    let noise_energy: f64 = signal
        .channels()
        .iter()
        .zip(noisy.channels())
        .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (y - x) * (y - x)))
        .sum();
    if noise_energy == 0.0 {
        return Ok(Snr::NoNoise);
    }
    let noise_rms = (noise_energy / (signal.frames() * signal.channel_count()) as f64).sqrt();
    Ok(Snr::Db(20.0 * (signal_rms / noise_rms).log10()))
}

/// Normalized autocorrelation `r[lag] / r[0]` for lags `0..max_lag`, with the
/// mean removed first.
pub fn autocorrelation(x: &[f64], max_lag: usize) -> Vec<f64> {
    let mean = x.iter().sum::<f64>() / x.len().max(1) as f64;
    let centered: Vec<f64> = x.iter().map(|v| v - mean).collect();
    let r0: f64 = centered.iter().map(|v| v * v).sum();
    (0..max_lag.min(x.len()))
        .map(|lag| {
            let r: f64 = centered[..x.len() - lag]
                .iter()
                .zip(&centered[lag..])
                .map(|(a, b)| a * b)
                .sum();
            if r0 > 0.0 {
                r / r0
            } else {
                0.0
            }
        })
        .collect()
}

/// Lag of the strongest autocorrelation peak after the first zero crossing.
pub fn fundamental_period(x: &[f64], max_lag: usize) -> Option<usize> {
    let ac = autocorrelation(x, max_lag);
    let start = ac.iter().position(|&v| v < 0.0)?;
    (start..ac.len())
        .max_by(|&a, &b| ac[a].total_cmp(&ac[b]))
        .filter(|&i| ac[i] > 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    const RATE: u32 = 16_000;

    #[test]
    fn rms_of_constant() {
        let b = AudioBuffer::mono(vec![0.5; 100], RATE).unwrap();
        assert_eq!(rms(&b).unwrap(), vec![0.5]);
    }

    #[test]
    fn rms_of_unit_sine_whole_periods() {
        // 400 Hz at 16 kHz: 40 samples per period, 1 s = 400 periods.
        let b = AudioBuffer::sine(400.0, 1.0, 1.0, RATE).unwrap();
        assert!((rms(&b).unwrap()[0] - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn rms_of_white_noise_matches_drawn_std() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let normal = Normal::new(0.0, 0.1).unwrap();
        let samples: Vec<f64> = (0..RATE).map(|_| normal.sample(&mut rng)).collect();
        // Statistical oracle: sqrt of the sample second moment of the draws.
        let oracle = (samples.iter().map(|s| s * s).sum::<f64>() / samples.len() as f64).sqrt();
        let b = AudioBuffer::mono(samples, RATE).unwrap();
        let measured = rms(&b).unwrap()[0];
        assert!((measured - oracle).abs() < 1e-12);
        assert!((measured - 0.1).abs() <= 0.005);
    }

    #[test]
    fn rms_of_empty_is_domain_error() {
        let b = AudioBuffer::mono(vec![], RATE).unwrap();
        assert!(matches!(rms(&b), Err(AudioError::Domain(_))));
    }

    #[test]
    fn dominant_frequency_of_tones() {
        let res = f64::from(RATE) / 16_384.0;
        for f in [440.0, 880.0] {
            let b = AudioBuffer::sine(f, 0.8, 1.5, RATE).unwrap();
            let d = dominant_frequency(&b, 16_384).unwrap();
            assert!((d - f).abs() <= res, "{f}: {d}");
        }
    }

    #[test]
    fn dominant_frequency_of_dc_is_zero() {
        let b = AudioBuffer::mono(vec![0.3; 2048], RATE).unwrap();
        assert_eq!(dominant_frequency(&b, 1024).unwrap(), 0.0);
    }

    #[test]
    fn dominant_frequency_rejects_short_and_non_pow2() {
        let b = AudioBuffer::mono(vec![0.3; 100], RATE).unwrap();
        assert!(dominant_frequency(&b, 128).is_err());
        assert!(dominant_frequency(&b, 48).is_err());
    }

    #[test]
    fn bin_centered_tone_lands_on_its_bin() {
        let fft = 1024;
        let bin = 37;
        let f = bin as f64 * f64::from(RATE) / fft as f64;
        let b = AudioBuffer::sine(f, 0.5, 0.2, RATE).unwrap();
        let s = spectrum(&b, fft).unwrap();
        assert_eq!(s.argmax(), bin);
        assert_eq!(dominant_frequency(&b, fft).unwrap(), f);
    }

    #[test]
    fn snr_definitions() {
        let signal = AudioBuffer::mono(vec![1.0, -1.0, 1.0, -1.0], RATE).unwrap();
        let noisy = AudioBuffer::mono(vec![1.1, -1.1, 1.1, -1.1], RATE).unwrap();
        let snr = measure_snr(&signal, &noisy).unwrap().db().unwrap();
        assert!((snr - 20.0).abs() < 1e-9);
        let noisy = AudioBuffer::mono(vec![2.0, -2.0, 2.0, -2.0], RATE).unwrap();
        assert!(measure_snr(&signal, &noisy).unwrap().db().unwrap().abs() < 1e-12);
        assert_eq!(measure_snr(&signal, &signal).unwrap(), Snr::NoNoise);
    }

    #[test]
    fn snr_rejects_shape_mismatch() {
        let a = AudioBuffer::mono(vec![1.0; 4], RATE).unwrap();
        let b = AudioBuffer::mono(vec![1.0; 5], RATE).unwrap();
        assert!(measure_snr(&a, &b).is_err());
    }

    #[test]
    fn period_of_sine() {
        let b = AudioBuffer::sine(100.0, 1.0, 0.5, RATE).unwrap();
        assert_eq!(fundamental_period(b.channel(0), 300), Some(160));
    }
}
