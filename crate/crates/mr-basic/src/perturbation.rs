use serde::{Deserialize, Serialize};
use sonomorph_audio::AudioBuffer;

use crate::{
    gain, inject_noise, pan, pitch_shift, repeat_segment, surround, time_shift, time_stretch,
    Result,
};

/// A basic perturbation together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BasicPerturbation {
    TimeStretch { factor: f64 },
    TimeShift { seconds: f64 },
    Pan { position: f64 },
    Surround { rotation_hz: f64 },
    PitchShift { semitones: f64 },
    NoiseInjection { target_snr_db: f64, seed: u64 },
    RepeatSegment { start_s: f64, end_s: f64, count: usize },
    Gain { db: f64 },
}

impl BasicPerturbation {
    pub fn apply(&self, x: &AudioBuffer) -> Result<AudioBuffer> {
        match *self {
            Self::TimeStretch { factor } => time_stretch(x, factor),
            Self::TimeShift { seconds } => time_shift(x, seconds),
            Self::Pan { position } => pan(x, position),
            Self::Surround { rotation_hz } => surround(x, rotation_hz),
            Self::PitchShift { semitones } => pitch_shift(x, semitones),
            Self::NoiseInjection { target_snr_db, seed } => inject_noise(x, target_snr_db, seed),
            Self::RepeatSegment {
                start_s,
                end_s,
                count,
            } => repeat_segment(x, start_s, end_s, count),
            Self::Gain { db } => gain(x, db),
        }
    }

    /// Stable snake_case name of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Self::TimeStretch { .. } => "time_stretch",
            Self::TimeShift { .. } => "time_shift",
            Self::Pan { .. } => "pan",
            Self::Surround { .. } => "surround",
            Self::PitchShift { .. } => "pitch_shift",
            Self::NoiseInjection { .. } => "noise_injection",
            Self::RepeatSegment { .. } => "repeat_segment",
            Self::Gain { .. } => "gain",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dispatches_to_gain() {
        let x = AudioBuffer::mono(vec![0.25; 8], 8_000).unwrap();
        let y = BasicPerturbation::Gain { db: 6.0206 }.apply(&x).unwrap();
        assert!((y.channel(0)[0] - 0.5).abs() < 1e-4);
    }
}
