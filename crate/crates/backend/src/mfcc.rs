//! Mel-frequency cepstral coefficients: 25 ms Hamming frames every 10 ms,
//! pre-emphasis 0.97, 26 triangular mel filters over 0–8 kHz (capped at
//! Nyquist), natural-log filter energies, orthonormal DCT-II, 13 coefficients.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use sonomorph_audio::dsp::hamming;
use sonomorph_audio::AudioBuffer;

use crate::{BackendError, Result};

pub const N_MFCC: usize = 13;
pub const FRAME_S: f64 = 0.025;
pub const HOP_S: f64 = 0.010;
const PRE_EMPHASIS: f64 = 0.97;
const N_FILTERS: usize = 26;
const MAX_FREQ_HZ: f64 = 8_000.0;
const MIN_FFT: usize = 512;
/// Floor added before the log so silent frames stay finite.
const LOG_FLOOR: f64 = 1e-12;

pub type MfccVector = [f64; N_MFCC];

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Precomputed window, filterbank and FFT plan for one sample rate.
pub struct MfccExtractor {
    sample_rate: u32,
    frame_len: usize,
    hop: usize,
    n_fft: usize,
    window: Vec<f64>,
    /// Per filter: first bin and the weights from there on.
    filters: Vec<(usize, Vec<f64>)>,
    dct: Vec<[f64; N_FILTERS]>,
    fft: Arc<dyn Fft<f64>>,
}

impl MfccExtractor {
    pub fn new(sample_rate: u32) -> Self {
        let rate = f64::from(sample_rate);
        let frame_len = ((FRAME_S * rate).round() as usize).max(2);
        let hop = ((HOP_S * rate).round() as usize).max(1);
        let n_fft = frame_len.next_power_of_two().max(MIN_FFT);
        let top = MAX_FREQ_HZ.min(rate / 2.0);
        let (mel_lo, mel_hi) = (hz_to_mel(0.0), hz_to_mel(top));
        let edges: Vec<f64> = (0..N_FILTERS + 2)
            .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (N_FILTERS + 1) as f64))
            .collect();
        let bin_hz = rate / n_fft as f64;
        let filters = (0..N_FILTERS)
            .map(|m| {
                let (lo, mid, hi) = (edges[m], edges[m + 1], edges[m + 2]);
                let first = (lo / bin_hz).ceil() as usize;
                let last = ((hi / bin_hz).floor() as usize).min(n_fft / 2);
                let weights = (first..=last)
                    .map(|k| {
                        let f = k as f64 * bin_hz;
                        if f <= mid {
                            (f - lo) / (mid - lo)
                        } else {
                            (hi - f) / (hi - mid)
                        }
                        .max(0.0)
                    })
                    .collect();
                (first, weights)
            })
            .collect();
        let dct = (0..N_MFCC)
            .map(|k| {
                let scale = if k == 0 { (1.0 / N_FILTERS as f64).sqrt() } else { (2.0 / N_FILTERS as f64).sqrt() };
                let mut row = [0.0; N_FILTERS];
                for (m, r) in row.iter_mut().enumerate() {
                    *r = scale * (PI * k as f64 * (m as f64 + 0.5) / N_FILTERS as f64).cos();
                }
                row
            })
            .collect();
        Self {
            sample_rate,
            frame_len,
            hop,
            n_fft,
            window: hamming(frame_len),
            filters,
            dct,
            fft: FftPlanner::new().plan_fft_forward(n_fft),
        }
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    /// Number of vectors produced for a clip of `frames` samples.
    pub fn vector_count(&self, frames: usize) -> usize {
        if frames < self.frame_len {
            0
        } else {
            (frames - self.frame_len) / self.hop + 1
        }
    }

    /// One vector per frame of the channel mix.
    pub fn extract(&self, audio: &AudioBuffer) -> Result<Vec<MfccVector>> {
        if audio.sample_rate() != self.sample_rate {
            return Err(BackendError::Domain(format!(
                "extractor built for {} Hz got {} Hz audio",
                self.sample_rate,
                audio.sample_rate()
            )));
        }
        let count = self.vector_count(audio.frames());
        if count == 0 {
            return Err(BackendError::Domain(format!(
                "{} frames is shorter than one {} ms analysis frame",
                audio.frames(),
                FRAME_S * 1e3
            )));
        }
        let mono = audio.to_mono();
        let x = mono.channel(0);
        let emphasized: Vec<f64> = (0..x.len())
            .map(|i| if i == 0 { x[0] } else { x[i] - PRE_EMPHASIS * x[i - 1] })
            .collect();

        let mut buf = vec![Complex::new(0.0, 0.0); self.n_fft];
        let mut scratch = vec![Complex::new(0.0, 0.0); self.fft.get_inplace_scratch_len()];
        let mut out = Vec::with_capacity(count);
        for f in 0..count {
            let start = f * self.hop;
            for (i, b) in buf.iter_mut().enumerate() {
                *b = if i < self.frame_len {
                    Complex::new(emphasized[start + i] * self.window[i], 0.0)
                } else {
                    Complex::new(0.0, 0.0)
                };
            }
            self.fft.process_with_scratch(&mut buf, &mut scratch);
            let mut log_energy = [0.0; N_FILTERS];
            for (e, (first, weights)) in log_energy.iter_mut().zip(&self.filters) {
                let energy: f64 = weights
                    .iter()
                    .enumerate()
                    .map(|(j, w)| w * buf[first + j].norm_sqr() / self.n_fft as f64)
                    .sum();
                *e = (energy + LOG_FLOOR).ln();
            }
            let mut v = [0.0; N_MFCC];
            for (c, row) in v.iter_mut().zip(&self.dct) {
                *c = row.iter().zip(&log_energy).map(|(a, b)| a * b).sum();
            }
            out.push(v);
        }
        Ok(out)
    }
}

/// Convenience wrapper building a fresh [`MfccExtractor`].
pub fn extract_mfcc(audio: &AudioBuffer) -> Result<Vec<MfccVector>> {
    MfccExtractor::new(audio.sample_rate()).extract(audio)
}
