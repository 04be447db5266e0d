use sonomorph_audio::AudioBuffer;

use crate::{param_err, Result};

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Multiplies every sample by `factor` without clamping.
pub fn scale(x: &AudioBuffer, factor: f64) -> AudioBuffer {
    x.map_samples(|s| s * factor)
}

/// `clamp(x * 10^(db/20))`, `|db| <= 40`.
pub fn gain(x: &AudioBuffer, db: f64) -> Result<AudioBuffer> {
    if !db.is_finite() || db.abs() > 40.0 {
        return Err(param_err(format!("gain {db} dB outside [-40, 40]")));
    }
    if db == 0.0 {
        return Ok(x.clone());
    }
    Ok(scale(x, db_to_linear(db)).clamped())
}
