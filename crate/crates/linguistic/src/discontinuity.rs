use std::collections::HashSet;

use sonomorph_audio::AudioBuffer;

use crate::{LinguisticError, Result, Transcript};

/// Indices of tokens that immediately precede a target and are not targets
/// themselves. These are the words a stutter is placed on.
pub fn discontinuity_sites(t: &Transcript, targets: &HashSet<String>) -> Vec<usize> {
    let targets: HashSet<String> = targets.iter().map(|w| t.language.normalize(w)).collect();
    (0..t.len().saturating_sub(1))
        .filter(|&i| t.matches(i + 1, &targets) && !t.matches(i, &targets))
        .collect()
}

/// Repeats every site token `repeats` times, each copy followed by
/// `stop_marker`: "son of a bitch" becomes "son of a ... a ... a ... bitch"
/// (rendered "son of a... a... a... bitch"). The result carries no alignment.
pub fn benign_discontinuity_text(
    t: &Transcript,
    targets: &HashSet<String>,
    stop_marker: &str,
    repeats: usize,
) -> Result<Transcript> {
    if repeats < 1 {
        return Err(LinguisticError::Parameter("repeats must be at least 1".into()));
    }
    if stop_marker.trim().is_empty() {
        return Err(LinguisticError::Parameter("stop marker is empty".into()));
    }
    let sites: HashSet<usize> = discontinuity_sites(t, targets).into_iter().collect();
    if sites.is_empty() {
        return Ok(t.clone());
    }
    let mut tokens = Vec::with_capacity(t.len() + sites.len() * repeats * 2);
    for (i, token) in t.tokens.iter().enumerate() {
        if sites.contains(&i) {
            for _ in 0..repeats {
                tokens.push(token.clone());
                tokens.push(stop_marker.to_string());
            }
        } else {
            tokens.push(token.clone());
        }
    }
    Ok(Transcript::new(tokens, t.language))
}

/// Audio counterpart of [`benign_discontinuity_text`] for an aligned
/// recording. After each site word's span, the sequence
/// `(gap, span) × (repeats - 1), gap` is spliced in, so each site adds
/// `(repeats - 1) · span + repeats · gap` seconds. Span edges and the gap are
/// rounded to whole frames independently.
pub fn benign_discontinuity_audio(
    x: &AudioBuffer,
    t: &Transcript,
    targets: &HashSet<String>,
    gap_s: f64,
    repeats: usize,
) -> Result<AudioBuffer> {
    if repeats < 1 {
        return Err(LinguisticError::Parameter("repeats must be at least 1".into()));
    }
    if !(gap_s.is_finite() && gap_s >= 0.0) {
        return Err(LinguisticError::Parameter(format!("gap {gap_s} s must be non-negative")));
    }
    let Some(spans) = &t.alignment else {
        return Err(LinguisticError::Domain(
            "audio discontinuity needs a word-aligned transcript".into(),
        ));
    };
    t.validate(Some(x.duration_s()))?;
    let sites = discontinuity_sites(t, targets);
    if sites.is_empty() {
        return Ok(x.clone());
    }
    let rate = f64::from(x.sample_rate());
    let frame_at = |s: f64| ((s * rate).round() as usize).min(x.frames());
    let gap = AudioBuffer::silence(x.channel_count(), x.frames_for(gap_s), x.sample_rate())?;

    let mut pieces = Vec::with_capacity(1 + sites.len() * (2 * repeats + 1));
    let mut cursor = 0;
    for i in sites {
        let (start, end) = (frame_at(spans[i].start_s), frame_at(spans[i].end_s));
        pieces.push(x.slice(cursor, end));
        let word = x.slice(start, end);
        for _ in 1..repeats {
            pieces.push(gap.clone());
            pieces.push(word.clone());
        }
        pieces.push(gap.clone());
        cursor = end;
    }
    pieces.push(x.slice(cursor, x.frames()));
    Ok(AudioBuffer::concat(&pieces)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Language, Span};

    fn set(words: &[&str]) -> HashSet<String> {
        words.iter().map(|w| w.to_string()).collect()
    }

    #[test]
    fn stutter_before_target() {
        let t = Transcript::from_text("son of a bitch", Language::En);
        let out = benign_discontinuity_text(&t, &set(&["bitch"]), "...", 3).unwrap();
        assert_eq!(out.render(), "son of a... a... a... bitch");
        assert_eq!(out.len(), t.len() + 2 + 3);
    }

    #[test]
    fn case_insensitive_targets() {
        let t = Transcript::from_text("You Bitch", Language::En);
        assert_eq!(discontinuity_sites(&t, &set(&["BITCH"])), vec![0]);
    }

    #[test]
    fn text_identity_without_targets() {
        let t = Transcript::from_text("son of a bitch", Language::En);
        assert_eq!(benign_discontinuity_text(&t, &set(&[]), "...", 3).unwrap(), t);
        assert!(benign_discontinuity_text(&t, &set(&["bitch"]), "...", 0).is_err());
    }

    #[test]
    fn target_at_start_has_no_site() {
        let t = Transcript::from_text("bitch please", Language::En);
        assert!(discontinuity_sites(&t, &set(&["bitch"])).is_empty());
    }

    fn aligned() -> (AudioBuffer, Transcript) {
        let x = AudioBuffer::sine(300.0, 0.5, 2.0, 16_000).unwrap();
        let t = Transcript::from_text("you bitch", Language::En)
            .with_alignment(vec![
                Span { start_s: 0.2, end_s: 0.6 },
                Span { start_s: 0.8, end_s: 1.4 },
            ])
            .unwrap();
        (x, t)
    }

    #[test]
    fn audio_duration_grows_by_spans_and_gaps() {
        let (x, t) = aligned();
        let y = benign_discontinuity_audio(&x, &t, &set(&["bitch"]), 0.5, 2).unwrap();
        // (2 - 1) * 0.4 + 2 * 0.5 = 1.4 s
        assert_eq!(y.frames() - x.frames(), 22_400);
    }

    #[test]
    fn inserted_gaps_are_silent() {
        let (x, t) = aligned();
        let y = benign_discontinuity_audio(&x, &t, &set(&["bitch"]), 0.5, 2).unwrap();
        let s = y.channel(0);
        // Layout: [0, 0.6) original, gap, word copy [0.2, 0.6), gap, rest.
        assert!(s[9_600..17_600].iter().all(|&v| v == 0.0));
        assert_eq!(&s[17_600..24_000], &x.channel(0)[3_200..9_600]);
        assert!(s[24_000..32_000].iter().all(|&v| v == 0.0));
        assert_eq!(&s[32_000..], &x.channel(0)[9_600..]);
    }

    #[test]
    fn audio_requires_alignment() {
        let (x, _) = aligned();
        let t = Transcript::from_text("you bitch", Language::En);
        assert!(matches!(
            benign_discontinuity_audio(&x, &t, &set(&["bitch"]), 0.5, 2),
            Err(LinguisticError::Domain(_))
        ));
    }

    #[test]
    fn audio_identity_without_targets() {
        let (x, t) = aligned();
        assert_eq!(benign_discontinuity_audio(&x, &t, &set(&[]), 0.5, 2).unwrap(), x);
    }
}
