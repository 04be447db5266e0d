use crate::{AudioError, Result};

/// Uniformly sampled PCM audio with one or two equal-length channels.
///
/// Samples are `f64` in nominal full scale `[-1, +1]`. Construction only
/// rejects non-finite samples; operations that apply the clamping policy
/// call [`AudioBuffer::clamped`] before returning.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioBuffer {
    channels: Vec<Vec<f64>>,
    sample_rate: u32,
}

impl AudioBuffer {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: u32) -> Result<Self> {
        if sample_rate == 0 {
            return Err(AudioError::InvalidBuffer("sample rate must be positive".into()));
        }
        if !(1..=2).contains(&channels.len()) {
            return Err(AudioError::InvalidBuffer(format!(
                "channel count must be 1 or 2, got {}",
                channels.len()
            )));
        }
        let frames = channels[0].len();
        if channels.iter().any(|c| c.len() != frames) {
            return Err(AudioError::InvalidBuffer("channels differ in frame count".into()));
        }
        if channels.iter().flatten().any(|s| !s.is_finite()) {
            return Err(AudioError::InvalidBuffer("non-finite sample".into()));
        }
        Ok(Self {
            channels,
            sample_rate,
        })
    }

    pub fn mono(samples: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![samples], sample_rate)
    }

    pub fn stereo(left: Vec<f64>, right: Vec<f64>, sample_rate: u32) -> Result<Self> {
        Self::new(vec![left, right], sample_rate)
    }

    pub fn silence(channel_count: usize, frames: usize, sample_rate: u32) -> Result<Self> {
        Self::new(vec![vec![0.0; frames]; channel_count], sample_rate)
    }

    /// Mono sine `amplitude * sin(2*pi*freq*t)` of the given length.
    pub fn sine(freq_hz: f64, amplitude: f64, duration_s: f64, sample_rate: u32) -> Result<Self> {
        let frames = (duration_s * f64::from(sample_rate)).round() as usize;
        let w = 2.0 * std::f64::consts::PI * freq_hz / f64::from(sample_rate);
        let samples = (0..frames).map(|n| amplitude * (w * n as f64).sin()).collect();
        Self::mono(samples, sample_rate)
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn frames(&self) -> usize {
        self.channels[0].len()
    }

    pub fn channel_count(&self) -> usize {
        self.channels.len()
    }

    pub fn duration_s(&self) -> f64 {
        self.frames() as f64 / f64::from(self.sample_rate)
    }

    pub fn is_empty(&self) -> bool {
        self.frames() == 0
    }

    pub fn channel(&self, index: usize) -> &[f64] {
        &self.channels[index]
    }

    pub fn channels(&self) -> &[Vec<f64>] {
        &self.channels
    }

    pub fn into_channels(self) -> Vec<Vec<f64>> {
        self.channels
    }

    /// Converts seconds to a frame count at this buffer's rate (rounded).
    pub fn frames_for(&self, seconds: f64) -> usize {
        (seconds * f64::from(self.sample_rate)).round().max(0.0) as usize
    }

    /// Largest absolute sample over all channels.
    pub fn peak(&self) -> f64 {
        self.channels
            .iter()
            .flatten()
            .fold(0.0_f64, |acc, s| acc.max(s.abs()))
    }

    /// Sum of squared samples over all channels.
    pub fn energy(&self) -> f64 {
        self.channels.iter().flatten().map(|s| s * s).sum()
    }

    /// Channel average; a mono buffer is returned unchanged.
    pub fn to_mono(&self) -> AudioBuffer {
        if self.channel_count() == 1 {
            return self.clone();
        }
        let n = self.channel_count() as f64;
        let mixed = (0..self.frames())
            .map(|i| self.channels.iter().map(|c| c[i]).sum::<f64>() / n)
            .collect();
        AudioBuffer {
            channels: vec![mixed],
            sample_rate: self.sample_rate,
        }
    }

    /// Applies `f` to every sample. Non-finite results are replaced by zero.
    pub fn map_samples(&self, mut f: impl FnMut(f64) -> f64) -> AudioBuffer {
        let channels = self
            .channels
            .iter()
            .map(|c| c.iter().map(|&s| finite_or_zero(f(s))).collect())
            .collect();
        AudioBuffer {
            channels,
            sample_rate: self.sample_rate,
        }
    }

    /// Applies `f` to each channel as a whole. Every returned channel must have
    /// the same length.
    pub fn map_channels(&self, mut f: impl FnMut(&[f64]) -> Vec<f64>) -> Result<AudioBuffer> {
        let channels = self.channels.iter().map(|c| f(c)).collect();
        AudioBuffer::new(channels, self.sample_rate)
    }

    /// Hard clamp into `[-1, +1]`.
    pub fn clamped(mut self) -> AudioBuffer {
        for s in self.channels.iter_mut().flatten() {
            *s = s.clamp(-1.0, 1.0);
        }
        self
    }

    /// Sub-range of frames `[start, end)`, clipped to the buffer.
    pub fn slice(&self, start: usize, end: usize) -> AudioBuffer {
        let end = end.min(self.frames());
        let start = start.min(end);
        AudioBuffer {
            channels: self.channels.iter().map(|c| c[start..end].to_vec()).collect(),
            sample_rate: self.sample_rate,
        }
    }

    /// Zero-extends (or truncates) every channel to `frames`.
    pub fn with_length(&self, frames: usize) -> AudioBuffer {
        let channels = self
            .channels
            .iter()
            .map(|c| {
                let mut c = c.clone();
                c.resize(frames, 0.0);
                c
            })
            .collect();
        AudioBuffer {
            channels,
            sample_rate: self.sample_rate,
        }
    }

    /// Concatenates buffers with matching rate and channel count.
    pub fn concat(parts: &[AudioBuffer]) -> Result<AudioBuffer> {
        let first = parts
            .first()
            .ok_or_else(|| AudioError::InvalidBuffer("nothing to concatenate".into()))?;
        let mut channels = vec![Vec::new(); first.channel_count()];
        for part in parts {
            if part.sample_rate != first.sample_rate || part.channel_count() != first.channel_count()
            {
                return Err(AudioError::InvalidBuffer(
                    "concatenated buffers differ in rate or channel count".into(),
                ));
            }
            for (dst, src) in channels.iter_mut().zip(&part.channels) {
                dst.extend_from_slice(src);
            }
        }
        AudioBuffer::new(channels, first.sample_rate)
    }

    /// Adds `gain * other` starting at frame `offset`, extending this buffer
    /// if `other` runs past its end. A mono `other` is added to every channel.
    pub fn overlay(&self, other: &AudioBuffer, offset: usize, gain: f64) -> Result<AudioBuffer> {
        if other.sample_rate != self.sample_rate {
            return Err(AudioError::InvalidBuffer("overlay with mismatched sample rate".into()));
        }
        if other.channel_count() != 1 && other.channel_count() != self.channel_count() {
            return Err(AudioError::InvalidBuffer("overlay with mismatched channel count".into()));
        }
        let frames = self.frames().max(offset + other.frames());
        let mut out = self.with_length(frames);
        for (ci, dst) in out.channels.iter_mut().enumerate() {
            let src = other.channel(ci.min(other.channel_count() - 1));
            for (d, s) in dst[offset..offset + src.len()].iter_mut().zip(src) {
                *d += gain * s;
            }
        }
        Ok(out)
    }
}

fn finite_or_zero(x: f64) -> f64 {
    if x.is_finite() {
        x
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_shapes() {
        assert!(AudioBuffer::new(vec![], 16_000).is_err());
        assert!(AudioBuffer::new(vec![vec![0.0]; 3], 16_000).is_err());
        assert!(AudioBuffer::new(vec![vec![0.0; 2], vec![0.0; 3]], 16_000).is_err());
        assert!(AudioBuffer::mono(vec![0.0], 0).is_err());
        assert!(AudioBuffer::mono(vec![f64::NAN], 16_000).is_err());
        assert!(AudioBuffer::mono(vec![f64::INFINITY], 16_000).is_err());
    }

    #[test]
    fn duration_derives_from_rate() {
        let b = AudioBuffer::silence(2, 8_000, 16_000).unwrap();
        assert_eq!(b.duration_s(), 0.5);
        assert_eq!(b.channel_count(), 2);
    }

    #[test]
    fn clamp_hits_full_scale() {
        let b = AudioBuffer::mono(vec![1.5, -2.0, 0.25], 8_000).unwrap().clamped();
        assert_eq!(b.channel(0), &[1.0, -1.0, 0.25]);
    }

    #[test]
    fn overlay_extends_and_adds() {
        let a = AudioBuffer::mono(vec![1.0, 1.0], 10).unwrap();
        let b = AudioBuffer::mono(vec![1.0, 1.0], 10).unwrap();
        let c = a.overlay(&b, 1, 0.5).unwrap();
        assert_eq!(c.channel(0), &[1.0, 1.5, 0.5]);
    }

    #[test]
    fn to_mono_averages() {
        let b = AudioBuffer::stereo(vec![1.0, 0.0], vec![0.0, 1.0], 10).unwrap();
        assert_eq!(b.to_mono().channel(0), &[0.5, 0.5]);
    }
}
