//! Offline desk corpus: a synthetic letter-by-letter "voice", seed
//! utterances with word alignment, keyword templates for the reference
//! spotter, a labeled calibration set and a ready-to-run campaign config.
//!
//! Everything is generated deterministically, so the shipped corpus can be
//! rebuilt with `cargo run -p sonomorph-harness --example make_desk`.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::path::Path;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sonomorph_audio::{rms_total, write_wav, AudioBuffer};
use sonomorph_backend::calibrate::{calibrate, Calibration};
use sonomorph_backend::{BackendConfig, Category, Execution, KeywordSpotter, ModerationBackend, Recorder};
use sonomorph_linguistic::{Language, Span, Transcript};

use crate::config::CampaignConfig;
use crate::{Campaign, HarnessError, Result};

pub const SAMPLE_RATE: u32 = 16_000;

/// Additive-synthesis speaker. Each letter is a short steady segment: a
/// harmonic series at `f0_hz` under a letter-specific formant envelope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Voice {
    pub f0_hz: f64,
    pub letter_s: f64,
    pub amplitude: f64,
    pub sample_rate: u32,
}

impl Voice {
    /// The speaker of the seed utterances and the word bank.
    pub fn desk() -> Self {
        Self {
            f0_hz: 120.0,
            letter_s: 0.08,
            amplitude: 0.05,
            sample_rate: SAMPLE_RATE,
        }
    }

    /// A second speaker, used for the spotter's templates.
    pub fn template() -> Self {
        Self {
            f0_hz: 128.0,
            letter_s: 0.075,
            amplitude: 0.05,
            sample_rate: SAMPLE_RATE,
        }
    }

    pub fn word(&self, word: &str) -> AudioBuffer {
        let rate = f64::from(self.sample_rate);
        let seg = (self.letter_s * rate).round() as usize;
        let letters: Vec<char> = word.chars().filter(char::is_ascii_alphabetic).collect();
        let top = (7_800.0 / self.f0_hz).floor() as usize;
        let mut out = Vec::with_capacity(seg * letters.len());
        for (k, c) in letters.iter().enumerate() {
            let env = envelope(c.to_ascii_lowercase());
            let harmonics: Vec<(f64, f64)> = (1..=top)
                .map(|h| {
                    let f = self.f0_hz * h as f64;
                    (2.0 * PI * f / rate, env(f))
                })
                .collect();
            for i in 0..seg {
                let n = (k * seg + i) as f64;
                out.push(self.amplitude * harmonics.iter().map(|(w, g)| g * (w * n).sin()).sum::<f64>());
            }
        }
        let fade = ((0.01 * rate) as usize).min(out.len() / 2);
        let len = out.len();
        for i in 0..fade {
            let g = 0.5 - 0.5 * (PI * i as f64 / fade as f64).cos();
            out[i] *= g;
            out[len - 1 - i] *= g;
        }
        AudioBuffer::mono(out, self.sample_rate).expect("valid mono buffer")
    }

    /// Speaks `text` word by word with `gap_s` between words and `pad_s`
    /// of silence around the utterance; returns the aligned transcript.
    pub fn utterance(&self, text: &str, gap_s: f64, pad_s: f64) -> (AudioBuffer, Transcript) {
        let silence = |s: f64| {
            AudioBuffer::silence(1, (s * f64::from(self.sample_rate)).round() as usize, self.sample_rate)
                .expect("valid silence")
        };
        let transcript = Transcript::from_text(text, Language::En);
        let mut parts = vec![silence(pad_s)];
        let mut spans = Vec::new();
        let mut at = parts[0].frames();
        for (i, token) in transcript.tokens.iter().enumerate() {
            if i > 0 {
                parts.push(silence(gap_s));
                at += parts.last().expect("just pushed").frames();
            }
            let w = self.word(token);
            let rate = f64::from(self.sample_rate);
            spans.push(Span {
                start_s: at as f64 / rate,
                end_s: (at + w.frames()) as f64 / rate,
            });
            at += w.frames();
            parts.push(w);
        }
        parts.push(silence(pad_s));
        let audio = AudioBuffer::concat(&parts).expect("same rate and channels");
        let transcript = transcript.with_alignment(spans).expect("spans are monotone");
        (audio, transcript)
    }
}

/// Formant envelope of one letter, as gain over frequency.
fn envelope(c: char) -> impl Fn(f64) -> f64 {
    let vowel = match c {
        'a' => Some((730.0, 1_090.0)),
        'e' => Some((530.0, 1_840.0)),
        'i' => Some((270.0, 2_290.0)),
        'o' => Some((570.0, 840.0)),
        'u' => Some((300.0, 870.0)),
        'y' => Some((360.0, 2_100.0)),
        _ => None,
    };
    let idx = (c as u8).wrapping_sub(b'a') as usize;
    let (f1, f2, level, hiss) = match vowel {
        Some((f1, f2)) => (f1, f2, 1.0, None),
        None => {
            let f1 = 180.0 + 37.0 * ((idx * 5) % 11) as f64;
            let f2 = 1_100.0 + 150.0 * ((idx * 7) % 13) as f64;
            let hiss = "cfhjkpstvxz".contains(c).then(|| 3_400.0 + 220.0 * (idx % 9) as f64);
            (f1, f2, 0.45, hiss)
        }
    };
    move |f: f64| {
        let res = |center: f64, bw: f64| 1.0 / (1.0 + ((f - center) / bw).powi(2));
        let voiced = res(f1, 90.0) + 0.6 * res(f2, 120.0);
        let fric = hiss.map_or(0.0, |h| 0.8 * res(h, 400.0));
        level * (voiced + fric + 0.02)
    }
}

/// Uniform white noise scaled to `rms`.
pub fn white_noise(frames: usize, rms: f64, seed: u64, sample_rate: u32) -> AudioBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let raw: Vec<f64> = (0..frames).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = (raw.iter().map(|v| v * v).sum::<f64>() / frames.max(1) as f64).sqrt();
    let scale = if r > 0.0 { rms / r } else { 0.0 };
    AudioBuffer::mono(raw.into_iter().map(|v| v * scale).collect(), sample_rate).expect("valid mono buffer")
}

/// Adds white noise `snr_db` below the clip's RMS.
pub fn add_noise(clip: &AudioBuffer, snr_db: f64, seed: u64) -> AudioBuffer {
    let level = rms_total(clip).expect("nonempty clip") / 10f64.powf(snr_db / 20.0);
    let n = white_noise(clip.frames(), level, seed, clip.sample_rate());
    clip.overlay(&n, 0, 1.0).expect("same shape")
}

/// Seed utterances: (id, category, text). The last one contains no
/// templated keyword, so seed filtering drops it.
pub const SEEDS: &[(&str, Category, &str)] = &[
    ("insult_01", Category::Insult, "fuck you"),
    ("insult_02", Category::Insult, "you are a bitch"),
    ("insult_03", Category::Insult, "this is shit"),
    ("insult_04", Category::Insult, "son of a bitch"),
    ("insult_05", Category::Insult, "shut the fuck up"),
    ("insult_06", Category::Insult, "what a piece of shit"),
    ("porn_01", Category::Porn, "show me your dick"),
    ("porn_02", Category::Porn, "send a dick picture"),
    ("porn_03", Category::Porn, "nice dick bro"),
    ("spam_01", Category::Spam, "play casino games online"),
    ("spam_02", Category::Spam, "win the lottery today"),
    ("spam_03", Category::Spam, "free casino bonus now"),
    ("spam_04", Category::Spam, "buy lottery tickets here"),
    ("insult_07", Category::Insult, "you silly goose"),
];

pub const TEMPLATES: &[(Category, &str)] = &[
    (Category::Insult, "bitch"),
    (Category::Insult, "fuck"),
    (Category::Insult, "shit"),
    (Category::Porn, "dick"),
    (Category::Spam, "casino"),
    (Category::Spam, "lottery"),
];

/// Calibration utterances; none of them is a seed.
pub const LABELED: &[(Category, &str)] = &[
    (Category::Insult, "go fuck yourself"),
    (Category::Insult, "stupid bitch"),
    (Category::Insult, "holy shit man"),
    (Category::Insult, "you little bitch"),
    (Category::Insult, "fuck off now"),
    (Category::Insult, "eat shit"),
    (Category::Porn, "big dick energy"),
    (Category::Porn, "dick pics here"),
    (Category::Spam, "casino night deals"),
    (Category::Spam, "lottery winner alert"),
    (Category::Spam, "best casino ever"),
    (Category::Spam, "daily lottery results"),
    (Category::NonToxic, "good morning friend"),
    (Category::NonToxic, "see you later"),
    (Category::NonToxic, "the weather is nice"),
    (Category::NonToxic, "thank you so much"),
    (Category::NonToxic, "call me back soon"),
    (Category::NonToxic, "happy birthday to you"),
    (Category::NonToxic, "let us have lunch"),
    (Category::NonToxic, "open the window please"),
    (Category::NonToxic, "folk music tonight"),
    (Category::NonToxic, "a clean sheet"),
    (Category::NonToxic, "walk on the beach"),
    (Category::NonToxic, "chairs on the deck"),
];

/// Extra homophone entries beyond the built-in English set.
pub const LEXICON: &str = "# word<TAB>candidates\nbitch\tbeach\n";

pub const TARGETS: &[&str] = &["fuck", "bitch", "shit", "dick", "casino", "lottery"];

pub const STOPWORDS: &str = "# function words\na\nare\nis\nme\nof\nthe\nthis\nto\nup\nyou\nyour\nwhat\nnow\nhere\n";

/// Toy moderation log for keyword selection, one message per line.
pub const CORPUS: &str = "\
you are a bitch
fuck you
this is shit
what a piece of shit
shut the fuck up
play casino games online
win the lottery today
show me your dick
son of a bitch
free casino bonus now
";

const WORD_GAP_S: f64 = 0.08;
const PAD_S: f64 = 0.3;
const SEED_SNR_DB: f64 = 30.0;

/// What [`write_desk`] produced.
#[derive(Debug, Clone, PartialEq)]
pub struct DeskSummary {
    pub seeds: usize,
    pub words: usize,
    pub calibration: Calibration,
}

/// The perturbations of the desk campaign, as `(name, descriptor)`.
pub fn desk_mrs() -> Vec<(&'static str, serde_json::Value)> {
    vec![
        ("gain_0db", json!({"kind": "gain", "db": 0.0})),
        ("gain_6db", json!({"kind": "gain", "db": 6.0})),
        ("time_stretch_0.8", json!({"kind": "time_stretch", "factor": 0.8})),
        ("time_stretch_1.25", json!({"kind": "time_stretch", "factor": 1.25})),
        ("time_shift", json!({"kind": "time_shift", "seconds": 0.2})),
        ("pan_left", json!({"kind": "pan", "position": -1.0})),
        ("surround", json!({"kind": "surround", "rotation_hz": 0.5})),
        ("pitch_up_2", json!({"kind": "pitch_shift", "semitones": 2.0})),
        ("pitch_down_4", json!({"kind": "pitch_shift", "semitones": -4.0})),
        ("noise_10db", json!({"kind": "noise_injection", "target_snr_db": 10.0, "seed": 7})),
        ("noise_0db", json!({"kind": "noise_injection", "target_snr_db": 0.0, "seed": 7})),
        ("compression", json!({"kind": "compression", "threshold_db": -20.0, "ratio": 4.0})),
        ("ring_mod", json!({"kind": "ring_mod", "carrier_hz": 30.0})),
        ("bass_boost", json!({"kind": "bass_boost", "cutoff_hz": 200.0, "gain_db": 12.0})),
        ("tremolo", json!({"kind": "tremolo", "rate_hz": 4.0, "depth": 0.8})),
        ("distortion", json!({"kind": "distortion", "clip_threshold": 0.02, "drive": 1.0})),
        ("echo", json!({"kind": "echo", "delay_s": 0.12, "decay": 0.6, "taps": 2})),
        ("reverb", json!({"kind": "reverb", "intensity": 0.6, "duration_s": 0.8, "seed": 11})),
        ("homophone", json!({"kind": "homophone_substitution", "seed": 3})),
        ("stutter_text", json!({"kind": "discontinuity_text", "repeats": 2})),
        ("stutter_audio", json!({"kind": "discontinuity_audio", "gap_s": 0.3, "repeats": 2})),
    ]
}

fn write(path: &Path, audio: &AudioBuffer) -> Result<()> {
    write_wav(audio, path, 16).map_err(|source| HarnessError::ArtifactWrite {
        path: path.display().to_string(),
        source,
    })
}

fn noise_seed(text: &str) -> u64 {
    // FNV-1a, so each utterance gets its own noise.
    text.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3))
}

/// Writes the desk corpus into `dir` and calibrates the spotter threshold
/// on the labeled clips; the threshold is written into `campaign.json`.
pub fn write_desk(dir: &Path) -> Result<DeskSummary> {
    for sub in ["voice", "templates", "seeds", "labeled"] {
        std::fs::create_dir_all(dir.join(sub))?;
    }
    let voice = Voice::desk();

    let mut vocabulary = BTreeSet::new();
    for (_, _, text) in SEEDS {
        vocabulary.extend(text.split_whitespace());
    }
    vocabulary.extend(["folk", "sheet", "deck", "beach"]);
    for w in &vocabulary {
        write(&dir.join("voice").join(format!("{w}.wav")), &voice.word(w))?;
    }

    let speaker = Voice::template();
    for (tag, word) in TEMPLATES {
        write(&dir.join("templates").join(format!("{tag}__{word}.wav")), &speaker.word(word))?;
    }

    let mut seeds = Vec::new();
    for (id, category, text) in SEEDS {
        let (clean, transcript) = voice.utterance(text, WORD_GAP_S, PAD_S);
        let audio = add_noise(&clean, SEED_SNR_DB, noise_seed(text));
        write(&dir.join("seeds").join(format!("{id}.wav")), &audio)?;
        std::fs::write(dir.join("seeds").join(format!("{id}.tsv")), transcript.to_tsv())?;
        seeds.push(json!({
            "id": id,
            "audio": format!("seeds/{id}.wav"),
            "transcript": format!("seeds/{id}.tsv"),
            "category": category,
        }));
    }

    let mut listing = String::new();
    let mut labeled = Vec::new();
    for (i, (category, text)) in LABELED.iter().enumerate() {
        let (clean, _) = voice.utterance(text, WORD_GAP_S, PAD_S);
        let audio = add_noise(&clean, SEED_SNR_DB, noise_seed(text));
        let name = format!("clip_{i:02}.wav");
        write(&dir.join("labeled").join(&name), &audio)?;
        listing.push_str(&format!("labeled/{name}\t{category}\n"));
        labeled.push((audio, *category));
    }
    std::fs::write(dir.join("labeled.tsv"), listing)?;
    std::fs::write(dir.join("lexicon.tsv"), LEXICON)?;
    std::fs::write(dir.join("stopwords.txt"), STOPWORDS)?;
    std::fs::write(dir.join("corpus.txt"), CORPUS)?;

    let spotter = KeywordSpotter::load("desk_spotter", dir.join("templates"))?;
    let calibration = calibrate(&spotter, &labeled, 0.25, 1, Execution::with_workers(4))?;

    let mrs: Vec<_> = desk_mrs()
        .into_iter()
        .map(|(name, mr)| json!({"name": name, "mr": mr}))
        .collect();
    let config = json!({
        "seeds": seeds,
        "mrs": mrs,
        "backends": [{
            "kind": "keyword_spotter",
            "name": "desk_spotter",
            "templates": "templates",
            "threshold": calibration.threshold,
        }],
        "language": "en",
        "lexicon": "lexicon.tsv",
        "targets": TARGETS,
        "tts": {"kind": "word_bank", "dir": "voice"},
        "workers": 4,
        "output_dir": "out",
    });
    std::fs::write(dir.join("campaign.json"), serde_json::to_string_pretty(&config)? + "\n")?;
    Ok(DeskSummary {
        seeds: SEEDS.len(),
        words: vocabulary.len(),
        calibration,
    })
}

/// Writes a fixture-backed demo next to an existing desk corpus: the desk
/// spotter's answers for every seed and case of a reduced campaign are
/// recorded into `fixtures.json`, so the demo runs without computing any
/// features. `desk_dir` must be a sibling of `demo_dir` named `desk`.
pub fn write_demo(desk_dir: &Path, demo_dir: &Path) -> Result<()> {
    std::fs::create_dir_all(demo_dir)?;
    let (desk, desk_base) = CampaignConfig::load(desk_dir.join("campaign.json"))?;
    let keep = ["gain_0db", "gain_6db", "time_stretch_1.25", "noise_0db", "ring_mod", "echo", "reverb"];
    let seeds: Vec<_> = desk
        .seeds
        .iter()
        .map(|s| {
            json!({
                "id": s.id,
                "audio": Path::new("../desk").join(&s.audio),
                "category": s.category,
            })
        })
        .collect();
    let mrs: Vec<_> = desk
        .mrs
        .iter()
        .filter(|m| keep.contains(&m.label()))
        .map(|m| json!({"name": m.label(), "mr": m.mr}))
        .collect();
    let config = json!({
        "seeds": seeds,
        "mrs": mrs,
        "backends": [{"kind": "fixture", "name": "recorded_spotter", "path": "fixtures.json"}],
        "workers": 4,
        "output_dir": "out",
    });
    let text = serde_json::to_string_pretty(&config)? + "\n";
    std::fs::write(demo_dir.join("campaign.json"), &text)?;

    let spotter = desk
        .backends
        .iter()
        .find(|b| matches!(b, BackendConfig::KeywordSpotter { .. }))
        .ok_or_else(|| HarnessError::Config("desk campaign has no keyword spotter".into()))?
        .build(&desk_base)?;
    let recorder = Arc::new(Recorder::new(spotter));
    let (config, base) = CampaignConfig::load(demo_dir.join("campaign.json"))?;
    let scratch = demo_dir.join(".recording");
    let backends = vec![recorder.clone() as Arc<dyn ModerationBackend>];
    Campaign::with_backends(config, base, backends)?.run(&scratch)?;
    std::fs::remove_dir_all(&scratch)?;
    recorder.fixture().save(demo_dir.join("fixtures.json"))?;
    Ok(())
}
