use serde::{Deserialize, Serialize};
use sonomorph_audio::AudioBuffer;

use crate::{bass_boost, compress, distort, echo, reverb, ring_modulate, tremolo, Result};

/// A compound perturbation together with its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CompoundPerturbation {
    Compression { threshold_db: f64, ratio: f64 },
    RingMod { carrier_hz: f64 },
    BassBoost { cutoff_hz: f64, gain_db: f64 },
    Tremolo { rate_hz: f64, depth: f64 },
    Distortion { clip_threshold: f64, drive: f64 },
    Echo { delay_s: f64, decay: f64, taps: usize },
    Reverb { intensity: f64, duration_s: f64, seed: u64 },
}

impl CompoundPerturbation {
    pub fn apply(&self, x: &AudioBuffer) -> Result<AudioBuffer> {
        match *self {
            Self::Compression { threshold_db, ratio } => compress(x, threshold_db, ratio),
            Self::RingMod { carrier_hz } => ring_modulate(x, carrier_hz),
            Self::BassBoost { cutoff_hz, gain_db } => bass_boost(x, cutoff_hz, gain_db),
            Self::Tremolo { rate_hz, depth } => tremolo(x, rate_hz, depth),
            Self::Distortion {
                clip_threshold,
                drive,
            } => distort(x, clip_threshold, drive),
            Self::Echo {
                delay_s,
                decay,
                taps,
            } => echo(x, delay_s, decay, taps),
            Self::Reverb {
                intensity,
                duration_s,
                seed,
            } => reverb(x, intensity, duration_s, seed),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Compression { .. } => "compression",
            Self::RingMod { .. } => "ring_mod",
            Self::BassBoost { .. } => "bass_boost",
            Self::Tremolo { .. } => "tremolo",
            Self::Distortion { .. } => "distortion",
            Self::Echo { .. } => "echo",
            Self::Reverb { .. } => "reverb",
        }
    }
}
