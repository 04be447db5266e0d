use std::f64::consts::{FRAC_PI_4, PI};

use sonomorph_audio::AudioBuffer;

use crate::{param_err, Result};

/// Constant-power pan law: `(cos θ, sin θ)` with `θ = (position + 1)·π/4`.
pub fn pan_gains(position: f64) -> (f64, f64) {
    let theta = (position + 1.0) * FRAC_PI_4;
    (theta.cos(), theta.sin())
}

/// Places the (mono-mixed) signal at `position` in `[-1, +1]`, left to right.
/// Always returns stereo.
pub fn pan(x: &AudioBuffer, position: f64) -> Result<AudioBuffer> {
    if !(-1.0..=1.0).contains(&position) {
        return Err(param_err(format!("pan position {position} outside [-1, 1]")));
    }
    let (gl, gr) = pan_gains(position);
    let mono = x.to_mono();
    let m = mono.channel(0);
    Ok(AudioBuffer::stereo(
        m.iter().map(|s| s * gl).collect(),
        m.iter().map(|s| s * gr).collect(),
        x.sample_rate(),
    )?)
}

/// Rotating source: a time-varying pan with `position(t) = sin(2π·rate·t)`.
pub fn surround(x: &AudioBuffer, rotation_hz: f64) -> Result<AudioBuffer> {
    if !(rotation_hz > 0.0 && rotation_hz <= 5.0) {
        return Err(param_err(format!("rotation {rotation_hz} Hz outside (0, 5]")));
    }
    let mono = x.to_mono();
    let rate = f64::from(x.sample_rate());
    let (left, right): (Vec<f64>, Vec<f64>) = mono
        .channel(0)
        .iter()
        .enumerate()
        .map(|(n, s)| {
            let position = (2.0 * PI * rotation_hz * n as f64 / rate).sin();
            let (gl, gr) = pan_gains(position);
            (s * gl, s * gr)
        })
        .unzip();
    Ok(AudioBuffer::stereo(left, right, x.sample_rate())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use sonomorph_audio::analysis::fundamental_period;
    use sonomorph_audio::dsp::frame_rms;
    use sonomorph_audio::rms;

    const RATE: u32 = 16_000;

    fn tone() -> AudioBuffer {
        AudioBuffer::sine(440.0, 0.5, 1.0, RATE).unwrap()
    }

    #[test]
    fn hard_left_silences_right() {
        let y = pan(&tone(), -1.0).unwrap();
        assert_eq!(y.channel_count(), 2);
        assert!(y.channel(1).iter().all(|&s| s.abs() < 1e-15));
        assert!(rms(&y).unwrap()[1] < 1e-9);
    }

    #[test]
    fn center_is_balanced() {
        let r = rms(&pan(&tone(), 0.0).unwrap()).unwrap();
        assert!(((r[0] - r[1]) / r[0]).abs() < 1e-9);
    }

    #[test]
    fn half_right_ratio_follows_law() {
        let r = rms(&pan(&tone(), 0.5).unwrap()).unwrap();
        // θ = 1.5·π/4 = 3π/8.
        let expected = (3.0 * PI / 8.0).tan();
        assert!((r[1] / r[0] / expected - 1.0).abs() < 0.01);
    }

    #[test]
    fn pan_rejects_out_of_range() {
        assert!(pan(&tone(), 1.01).is_err());
    }

    #[test]
    fn surround_envelope_period_matches_rotation() {
        let x = AudioBuffer::mono(vec![0.5; 4 * RATE as usize], RATE).unwrap();
        let y = surround(&x, 1.0).unwrap();
        let frame = 160; // 10 ms envelope resolution
        let env = frame_rms(y.channel(0), frame);
        let lag = fundamental_period(&env, env.len() / 2).unwrap();
        let period = lag as f64 * frame as f64 / f64::from(RATE);
        assert!((period - 1.0).abs() <= 0.05, "{period}");
    }

    #[test]
    fn surround_keeps_frame_power() {
        let x = tone();
        let y = surround(&x, 2.0).unwrap();
        let frame = 320;
        let a = frame_rms(x.channel(0), frame);
        let l = frame_rms(y.channel(0), frame);
        let r = frame_rms(y.channel(1), frame);
        for ((a, l), r) in a.iter().zip(&l).zip(&r) {
            let db = 10.0 * ((l * l + r * r) / (a * a)).log10();
            assert!(db.abs() <= 0.5, "{db}");
        }
    }

    #[test]
    fn surround_of_silence_is_silence() {
        let x = AudioBuffer::silence(1, 1_000, RATE).unwrap();
        let y = surround(&x, 1.0).unwrap();
        assert!(y.channels().iter().flatten().all(|&s| s == 0.0));
    }

    #[test]
    fn surround_rejects_fast_rotation() {
        assert!(surround(&tone(), 5.5).is_err());
        assert!(surround(&tone(), 0.0).is_err());
    }
}
