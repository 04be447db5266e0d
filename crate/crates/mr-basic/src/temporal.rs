use sonomorph_audio::dsp::hann;
use sonomorph_audio::AudioBuffer;

use crate::{param_err, Result};

const FRAME_S: f64 = 0.050;
const SEEK_S: f64 = 0.005;

/// Changes duration by `factor` (2.0 doubles it) while keeping pitch, using
/// waveform-similarity overlap-add: 50 ms Hann frames at 50% synthesis
/// overlap, each analysis frame nudged within ±5 ms to the offset that best
/// continues the previously emitted waveform.
pub fn time_stretch(x: &AudioBuffer, factor: f64) -> Result<AudioBuffer> {
    if !(0.25..=4.0).contains(&factor) {
        return Err(param_err(format!("stretch factor {factor} outside [0.25, 4]")));
    }
    if factor == 1.0 {
        return Ok(x.clone());
    }
    let frame = x.frames_for(FRAME_S).max(4);
    let synthesis_hop = frame / 2;
    let analysis_hop = synthesis_hop as f64 / factor;
    let seek = x.frames_for(SEEK_S) as isize;
    let overlap = frame - synthesis_hop;
    let out_len = (x.frames() as f64 * factor).round() as usize;

    let guide = x.to_mono();
    let guide = guide.channel(0);
    let window = hann(frame);

    let mut out = vec![vec![0.0; out_len + frame]; x.channel_count()];
    let mut norm = vec![0.0; out_len + frame];
    let mut prev: Option<usize> = None;
    let mut k = 0usize;
    loop {
        let out_pos = k * synthesis_hop;
        if out_pos >= out_len {
            break;
        }
        let nominal = (k as f64 * analysis_hop).round() as isize;
        let pos = match prev {
            None => nominal.max(0) as usize,
            Some(p) => best_alignment(guide, p + synthesis_hop, nominal, seek, overlap),
        };
        for (dst, src) in out.iter_mut().zip(x.channels()) {
            for (i, w) in window.iter().enumerate() {
                dst[out_pos + i] += w * src.get(pos + i).copied().unwrap_or(0.0);
            }
        }
        for (n, w) in norm[out_pos..].iter_mut().zip(&window) {
            *n += w;
        }
        prev = Some(pos);
        k += 1;
    }
    let channels = out
        .into_iter()
        .map(|mut c| {
            for (s, n) in c.iter_mut().zip(&norm) {
                if *n > 1e-9 {
                    *s /= n;
                }
            }
            c.truncate(out_len);
            c
        })
        .collect();
    Ok(AudioBuffer::new(channels, x.sample_rate())?)
}

/// Start index within `nominal ± seek` whose first `overlap` samples best
/// cross-correlate with the natural continuation starting at `natural`.
fn best_alignment(guide: &[f64], natural: usize, nominal: isize, seek: isize, overlap: usize) -> usize {
    let at = |i: usize| guide.get(i).copied().unwrap_or(0.0);
    let reference: Vec<f64> = (0..overlap).map(|i| at(natural + i)).collect();
    let mut best = (nominal.max(0) as usize, f64::NEG_INFINITY);
    for delta in -seek..=seek {
        let cand = nominal + delta;
        if cand < 0 {
            continue;
        }
        let cand = cand as usize;
        let score: f64 = reference
            .iter()
            .enumerate()
            .map(|(i, r)| r * at(cand + i))
            .sum();
        if score > best.1 {
            best = (cand, score);
        }
    }
    best.0
}

/// `y[n] = x[n - delta*rate]`, zero-filled where the shifted signal vacates;
/// duration unchanged.
pub fn time_shift(x: &AudioBuffer, delta_s: f64) -> Result<AudioBuffer> {
    if !delta_s.is_finite() || delta_s.abs() >= x.duration_s() {
        return Err(param_err(format!(
            "shift {delta_s} s must be shorter than the {} s clip",
            x.duration_s()
        )));
    }
    let d = (delta_s * f64::from(x.sample_rate())).round() as isize;
    let n = x.frames() as isize;
    Ok(x.map_channels(|c| {
        (0..n)
            .map(|i| {
                let src = i - d;
                if (0..n).contains(&src) {
                    c[src as usize]
                } else {
                    0.0
                }
            })
            .collect()
    })?)
}

/// Prepends `frames` zeros (the length grows by `frames`).
pub fn delay(x: &AudioBuffer, frames: usize) -> AudioBuffer {
    AudioBuffer::silence(x.channel_count(), frames, x.sample_rate())
        .and_then(|pad| AudioBuffer::concat(&[pad, x.clone()]))
        .expect("delay preserves buffer invariants")
}
