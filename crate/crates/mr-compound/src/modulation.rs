use std::f64::consts::PI;

use sonomorph_audio::AudioBuffer;

use crate::{param_err, Result};

/// `y[n] = x[n] · sin(2π·carrier·n/rate)`.
pub fn ring_modulate(x: &AudioBuffer, carrier_hz: f64) -> Result<AudioBuffer> {
    let nyquist = f64::from(x.sample_rate()) / 2.0;
    if !(carrier_hz > 0.0 && carrier_hz < nyquist) {
        return Err(param_err(format!("carrier {carrier_hz} Hz outside (0, {nyquist})")));
    }
    let w = 2.0 * PI * carrier_hz / f64::from(x.sample_rate());
    Ok(x
        .map_channels(|c| c.iter().enumerate().map(|(n, s)| s * (w * n as f64).sin()).collect())?
        .clamped())
}

/// `y = x · (1 + depth·sin(2π·rate·t)) / (1 + depth)`; the normalization keeps
/// the peak at or below the input peak.
pub fn tremolo(x: &AudioBuffer, rate_hz: f64, depth: f64) -> Result<AudioBuffer> {
    if !(0.5..=20.0).contains(&rate_hz) {
        return Err(param_err(format!("tremolo rate {rate_hz} Hz outside [0.5, 20]")));
    }
    if !(depth > 0.0 && depth <= 1.0) {
        return Err(param_err(format!("tremolo depth {depth} outside (0, 1]")));
    }
    let w = 2.0 * PI * rate_hz / f64::from(x.sample_rate());
    let norm = 1.0 + depth;
    Ok(x
        .map_channels(|c| {
            c.iter()
                .enumerate()
                .map(|(n, s)| s * (1.0 + depth * (w * n as f64).sin()) / norm)
                .collect()
        })?
        .clamped())
}
