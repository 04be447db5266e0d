use sonomorph_audio::AudioBuffer;
use sonomorph_mr_basic::{delay, scale};

use crate::{param_err, Result};

/// Feed-forward delay line: `y[n] = x[n] + Σ_{k=1..taps} decay^k · x[n - k·D]`
/// with `D = round(delay_s · rate)`. The output is extended by `taps·D`
/// frames to hold the last repetition; `decay == 0` returns `x` unchanged.
pub fn echo(x: &AudioBuffer, delay_s: f64, decay: f64, taps: usize) -> Result<AudioBuffer> {
    if !(delay_s.is_finite() && delay_s > 0.0) {
        return Err(param_err(format!("echo delay {delay_s} s must be positive")));
    }
    if !(0.0..1.0).contains(&decay) {
        return Err(param_err(format!("echo decay {decay} outside [0, 1)")));
    }
    if taps < 1 {
        return Err(param_err("echo needs at least one tap"));
    }
    if decay == 0.0 {
        return Ok(x.clone());
    }
    let step = x.frames_for(delay_s).max(1);
    let mut y = x.clone();
    for k in 1..=taps {
        let tap = delay(&scale(x, decay.powi(k as i32)), k * step);
        y = y.overlay(&tap, 0, 1.0)?;
    }
    Ok(y.clamped())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sonomorph_audio::analysis::autocorrelation;

    const RATE: u32 = 16_000;

    #[test]
    fn impulse_taps() {
        let mut s = vec![0.0; RATE as usize];
        s[0] = 1.0;
        let x = AudioBuffer::mono(s, RATE).unwrap();
        let y = echo(&x, 0.25, 0.5, 2).unwrap();
        assert_eq!(y.frames(), RATE as usize + 8_000);
        let c = y.channel(0);
        assert!((c[0] - 1.0).abs() < 1e-6);
        assert!((c[4_000] - 0.5).abs() < 1e-6);
        assert!((c[8_000] - 0.25).abs() < 1e-6);
        assert_eq!(c.iter().filter(|&&v| v != 0.0).count(), 3);
    }

    #[test]
    fn zero_decay_is_identity() {
        let x = AudioBuffer::sine(200.0, 0.5, 0.3, RATE).unwrap();
        assert_eq!(echo(&x, 0.1, 0.0, 3).unwrap(), x);
    }

    #[test]
    fn autocorrelation_peaks_at_delay() {
        // Broadband deterministic burst so the only long-lag structure is the echo.
        let mut s: Vec<f64> = sonomorph_mr_basic::gaussian_noise(2_000, 17)
            .into_iter()
            .map(|v| 0.2 * v)
            .collect();
        s.resize(RATE as usize, 0.0);
        let x = AudioBuffer::mono(s, RATE).unwrap();
        let y = echo(&x, 0.25, 0.6, 1).unwrap();
        let ac = autocorrelation(y.channel(0), 6_000);
        let lag = (1_000..ac.len()).max_by(|&a, &b| ac[a].total_cmp(&ac[b])).unwrap();
        assert!((lag as i64 - 4_000).abs() <= 1, "{lag}");
    }

    #[test]
    fn rejects_bad_params() {
        let x = AudioBuffer::silence(1, 10, RATE).unwrap();
        assert!(echo(&x, 0.0, 0.5, 1).is_err());
        assert!(echo(&x, 0.1, 1.0, 1).is_err());
        assert!(echo(&x, 0.1, 0.5, 0).is_err());
    }
}
