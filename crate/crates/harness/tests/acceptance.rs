//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits non-zero when any fails.

mod common;

use std::collections::{BTreeSet, HashSet};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;
use sonomorph_audio::analysis::fundamental_period;
use sonomorph_audio::dsp::frame_rms;
use sonomorph_audio::{dominant_frequency, measure_snr, rms_total, spectrum, AudioBuffer};
use sonomorph_backend::http::{BodyTemplate, ResponseMapping, RetryPolicy};
use sonomorph_backend::mock::{MockResponse, MockServer};
use sonomorph_backend::{Category, HttpBackend, HttpTemplate, ModerationBackend};
use sonomorph_harness::*;
use sonomorph_linguistic::{
    benign_discontinuity_audio, benign_discontinuity_text, homophone_substitute, parse_corpus, select_keywords,
    HomophoneLexicon, Language, Transcript,
};
use sonomorph_mr_basic as basic;
use sonomorph_mr_compound as compound;

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn workspace() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn within(elapsed: Duration, limit_s: u64) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_s) {
        return Err(format!("took {elapsed:?}, limit {limit_s} s"));
    }
    Ok(())
}

fn efr_exactness() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let half = -20.0 * 2f64.log10();
    for trial in 0..50 {
        let n: usize = rng.gen_range(1..=40);
        let k: usize = rng.gen_range(0..=n);
        let u: usize = rng.gen_range(0..=3);
        let dir = root.path().join(format!("t{trial}"));
        std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
        let config = level_campaign(
            &dir,
            &vec![Category::Insult; n + u],
            json!([{"name": "half", "mr": {"kind": "gain", "db": half}}]),
            &["mock"],
        );
        // Perturbed copies of seeds 0..k are missed, of n..n+u unanswered.
        let mock = backend("mock", move |a| {
            if level(a) > 0.3 {
                return Ok(Category::Insult);
            }
            let i = ((level(a) * 2.0 - 0.4) / 0.001).round() as usize;
            if i >= n {
                Err(unavailable())
            } else if i < k {
                Ok(Category::NonToxic)
            } else {
                Ok(Category::Insult)
            }
        });
        let report = Campaign::with_backends(config, &dir, vec![mock])
            .and_then(|c| c.run(&dir.join("out")))
            .map_err(|e| e.to_string())?;
        let c = &report.cells[0];
        let expected = (100 * k) as f64 / n as f64;
        ensure!(
            c.answered() == n && c.misclassified == k && c.efr == Some(expected),
            "k={k} n={n} u={u}: got {:?} from {} answered",
            c.efr,
            c.answered()
        );
    }
    within(start.elapsed(), 5)?;
    Ok(format!("50 randomized (k, n) pairs exact in {:.2?}", start.elapsed()))
}

fn seed_filter_protocol() -> Check {
    // Rows: seeds; columns: backends. 'd' declared category, 'o' other
    // toxic, 'n' non_toxic, 'x' unavailable.
    let matrix = ["ddd", "dnn", "ndn", "nnd", "nnn", "onn", "ooo", "xnn", "xxd", "nxn"];
    let seeds: Vec<Seed> = matrix
        .iter()
        .enumerate()
        .map(|(i, _)| Seed {
            id: format!("s{i}"),
            category: if i % 2 == 0 { Category::Insult } else { Category::Spam },
            audio: level_clip(0.4 + 0.001 * i as f64),
            transcript: None,
        })
        .collect();
    let backends: Vec<Arc<dyn ModerationBackend>> = (0..3)
        .map(|b| {
            backend(&format!("b{b}"), move |a| {
                let i = seed_index(a);
                let declared = if i % 2 == 0 { Category::Insult } else { Category::Spam };
                match matrix[i].as_bytes()[b] {
                    b'd' => Ok(declared),
                    b'o' => Ok(Category::Porn),
                    b'n' => Ok(Category::NonToxic),
                    _ => Err(unavailable()),
                }
            })
        })
        .collect();
    let f = filter_seeds(&seeds, &backends, Default::default()).map_err(|e| e.to_string())?;
    let expected: Vec<bool> = matrix.iter().map(|row| row.contains('d')).collect();
    ensure!(f.retained == expected, "retained {:?}, expected {expected:?}", f.retained);
    let all_clean = seeds.iter().zip(&f.retained).filter(|(s, _)| s.id == "s4").all(|(_, &k)| !k);
    ensure!(all_clean, "a seed judged non_toxic by every backend was kept");
    Ok(format!(
        "{} of {} seeds retained as scripted",
        f.report.retained, f.report.total
    ))
}

fn transform_oracles() -> Check {
    let start = Instant::now();
    const RATE: u32 = 16_000;
    let fft = 16_384;
    let tone = AudioBuffer::sine(440.0, 0.5, 2.0, RATE).unwrap();
    let mut checked = 0;
    let mut pass = |ok: bool, what: String| -> Result<(), String> {
        checked += 1;
        if ok {
            Ok(())
        } else {
            Err(what)
        }
    };

    for factor in [0.5, 1.0, 2.0] {
        let y = basic::time_stretch(&tone, factor).map_err(|e| e.to_string())?;
        let dur = y.duration_s() / (factor * tone.duration_s());
        let f = dominant_frequency(&y, 8_192).unwrap();
        pass((dur - 1.0).abs() <= 0.02 && (f - 440.0).abs() <= 5.0, format!("time_stretch {factor}: {dur} {f}"))?;
    }
    for (semis, target) in [(12.0, 880.0), (-12.0, 220.0)] {
        let y = basic::pitch_shift(&tone, semis).map_err(|e| e.to_string())?;
        let s = spectrum(&y, fft).unwrap();
        let f = s.bin_frequencies[s.argmax()];
        let dur = y.duration_s() / tone.duration_s();
        pass((f - target).abs() <= s.resolution && (dur - 1.0).abs() <= 0.02, format!("pitch_shift {semis}: {f}"))?;
    }
    let g = basic::gain(&tone, 6.0206).unwrap();
    let ratio = rms_total(&g).unwrap() / rms_total(&tone).unwrap();
    pass((ratio - 2.0).abs() <= 0.02, format!("gain ratio {ratio}"))?;
    for snr in [6.0, 12.0, 20.0] {
        let y = basic::inject_noise(&tone, snr, 5).unwrap();
        let m = measure_snr(&tone, &y).unwrap().db().unwrap_or(f64::INFINITY);
        let same = y == basic::inject_noise(&tone, snr, 5).unwrap();
        pass((m - snr).abs() <= 1.0 && same, format!("noise {snr}: measured {m}, deterministic {same}"))?;
    }
    let left = basic::pan(&tone, -1.0).unwrap();
    let r = rms_total(&AudioBuffer::mono(left.channel(1).to_vec(), RATE).unwrap()).unwrap();
    pass(r < 1e-9, format!("pan -1 right rms {r}"))?;
    for p in [-1.0, -0.5, 0.0, 0.3, 1.0] {
        let y = basic::pan(&tone, p).unwrap();
        let db = 10.0 * (y.energy() / tone.energy()).log10();
        pass(db.abs() <= 0.5, format!("pan {p}: power {db} dB"))?;
    }
    let y = compound::ring_modulate(&AudioBuffer::sine(440.0, 0.8, 2.0, RATE).unwrap(), 30.0).unwrap();
    let s = spectrum(&y, fft).unwrap();
    let mut top: Vec<f64> = s.peaks()[..2].iter().map(|&i| s.bin_frequencies[i]).collect();
    top.sort_by(f64::total_cmp);
    pass(
        (top[0] - 410.0).abs() <= s.resolution && (top[1] - 470.0).abs() <= s.resolution,
        format!("ring_mod peaks {top:?}"),
    )?;
    let full = AudioBuffer::sine(440.0, 1.0, 2.0, RATE).unwrap();
    let y = compound::compress(&full, -20.0, 4.0).unwrap();
    let tail = &y.channel(0)[RATE as usize..];
    let peak_db = 20.0 * tail.iter().fold(0.0_f64, |m, v| m.max(v.abs())).log10();
    pass((peak_db + 15.0).abs() <= 1.0, format!("compress steady peak {peak_db} dBFS"))?;
    let mut imp = vec![0.0; RATE as usize];
    imp[0] = 1.0;
    let imp = AudioBuffer::mono(imp, RATE).unwrap();
    let y = compound::echo(&imp, 0.25, 0.5, 2).unwrap();
    let c = y.channel(0);
    pass(
        (c[0] - 1.0).abs() < 1e-6 && (c[4_000] - 0.5).abs() < 1e-6 && (c[8_000] - 0.25).abs() < 1e-6,
        format!("echo taps {} {} {}", c[0], c[4_000], c[8_000]),
    )?;
    let x = AudioBuffer::sine(300.0, 0.5, 0.5, RATE).unwrap();
    let y = compound::reverb(&x, 0.0, 0.3, 1).unwrap();
    let h = compound::impulse_response(0.0, 0.3, 1, RATE);
    pass(
        y.frames() == x.frames() + h.len() - 1 && y.channel(0)[..x.frames()] == *x.channel(0),
        format!("reverb 0: {} frames", y.frames()),
    )?;
    let flat = AudioBuffer::mono(vec![0.6; 2 * RATE as usize], RATE).unwrap();
    let y = compound::tremolo(&flat, 4.0, 0.8).unwrap();
    let env = frame_rms(y.channel(0), 80);
    let period = fundamental_period(&env, env.len() / 2).unwrap_or(0) as f64 * 80.0 / f64::from(RATE);
    pass(
        (period - 0.25).abs() <= 0.0125 && y.peak() <= flat.peak(),
        format!("tremolo period {period}"),
    )?;
    let unit = AudioBuffer::sine(440.0, 1.0, 1.5, RATE).unwrap();
    let clipped = compound::hard_clip(&unit, 0.5);
    let y = compound::distort(&unit, 0.5, 0.5).unwrap();
    let s = spectrum(&y, fft).unwrap();
    let mut sorted = s.magnitudes.clone();
    sorted.sort_by(f64::total_cmp);
    let third = 20.0 * (s.magnitude_near(1_320.0, 2) / sorted[sorted.len() / 2]).log10();
    pass(clipped.peak() == 0.5 && third >= 20.0, format!("distortion third harmonic {third} dB"))?;
    let settled = |b: &AudioBuffer| b.channel(0)[b.frames() / 2..].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let hi = AudioBuffer::sine(4_000.0, 0.3, 1.0, RATE).unwrap();
    let db = 20.0 * (settled(&compound::bass_boost(&hi, 200.0, 6.0).unwrap()) / settled(&hi)).log10();
    let lo = AudioBuffer::sine(50.0, 0.3, 1.0, RATE).unwrap();
    let boost = settled(&compound::bass_boost(&lo, 200.0, 6.0).unwrap()) / settled(&lo);
    let want = 1.0 + basic::db_to_linear(6.0);
    pass(
        db.abs() <= 1.0 && (boost / want - 1.0).abs() <= 0.10,
        format!("bass_boost high {db} dB, low x{boost}"),
    )?;

    within(start.elapsed(), 60)?;
    Ok(format!("{checked} oracle checks in {:.2?}", start.elapsed()))
}

/// First path segment of every `use` and `a::b` path in `source`.
fn path_roots(source: &str) -> BTreeSet<String> {
    let mut roots = BTreeSet::new();
    for line in source.lines().map(str::trim).filter(|l| !l.starts_with("//")) {
        let chars: Vec<char> = line.chars().collect();
        for i in 0..chars.len().saturating_sub(1) {
            if chars[i] == ':' && chars[i + 1] == ':' {
                let mut j = i;
                while j > 0 && (chars[j - 1].is_alphanumeric() || chars[j - 1] == '_') {
                    j -= 1;
                }
                let leading = j == 0 || !matches!(chars[j - 1], ':' | '<' | '>' | '&' | '\'');
                let ident: String = chars[j..i].iter().collect();
                if leading && ident.starts_with(|c: char| c.is_lowercase()) {
                    roots.insert(ident);
                }
            }
        }
    }
    roots
}

fn architecture() -> Check {
    let dir = workspace().join("crates/mr-compound");
    let manifest: toml::Table = std::fs::read_to_string(dir.join("Cargo.toml"))
        .map_err(|e| e.to_string())?
        .parse()
        .map_err(|e: toml::de::Error| e.to_string())?;
    let deps: BTreeSet<String> = manifest["dependencies"].as_table().ok_or("no dependencies")?.keys().cloned().collect();
    let allowed_deps: BTreeSet<String> = ["serde", "sonomorph-audio", "sonomorph-mr-basic"].map(String::from).into();
    ensure!(deps.is_subset(&allowed_deps), "compound depends on {deps:?}");
    let mut modules = HashSet::new();
    let mut sources = Vec::new();
    for entry in std::fs::read_dir(dir.join("src")).map_err(|e| e.to_string())? {
        let path = entry.map_err(|e| e.to_string())?.path();
        modules.insert(path.file_stem().unwrap().to_string_lossy().into_owned());
        sources.push(path);
    }
    let allowed = [
        "std", "core", "crate", "super", "self", "serde", "sonomorph_audio", "sonomorph_mr_basic", "f64", "f32", "usize",
        "u32", "u64", "i16", "i32", "i64", "u16", "u8", "str",
    ];
    for path in &sources {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let body = text.split("#[cfg(test)]").next().unwrap_or_default();
        for root in path_roots(body) {
            ensure!(
                allowed.contains(&root.as_str()) || modules.contains(&root),
                "{} references `{root}`",
                path.display()
            );
        }
    }
    Ok(format!("{} source files reference only the audio and basic crates", sources.len()))
}

fn tfidf_oracle(docs: &[Vec<String>]) -> Vec<String> {
    let n = docs.len() as f64;
    let vocab: BTreeSet<&String> = docs.iter().flatten().collect();
    let mut scored: Vec<(String, f64)> = vocab
        .into_iter()
        .map(|t| {
            let df = docs.iter().filter(|d| d.contains(t)).count() as f64;
            let idf = ((1.0 + n) / (1.0 + df)).ln() + 1.0;
            let best = docs
                .iter()
                .map(|d| d.iter().filter(|w| *w == t).count() as f64 * idf)
                .fold(0.0, f64::max);
            (t.clone(), best)
        })
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scored.into_iter().map(|(t, _)| t).collect()
}

fn tfidf() -> Check {
    const VOCAB: [&str; 9] = ["buy", "cheap", "pills", "hello", "friend", "win", "cash", "now", "free"];
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for round in 0..5 {
        let n_docs = rng.gen_range(1..=6);
        let docs: Vec<Vec<String>> = (0..n_docs)
            .map(|_| {
                let len = rng.gen_range(1..=(30 / n_docs).max(1));
                (0..len).map(|_| VOCAB[rng.gen_range(0..VOCAB.len())].to_string()).collect()
            })
            .collect();
        let text: String = docs.iter().map(|d| d.join(" ") + "\n").collect();
        let corpus = parse_corpus(&text, Language::En);
        let got: Vec<String> = select_keywords(&corpus, &HashSet::new(), VOCAB.len())
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|k| k.token)
            .collect();
        let want = tfidf_oracle(&docs);
        ensure!(got == want, "corpus {round}: {got:?} != {want:?}");
    }
    Ok("5 random corpora match the brute-force ordering".into())
}

fn linguistic() -> Check {
    let lex = HomophoneLexicon::english_default();
    let targets: HashSet<String> = ["fuck", "bitch"].map(String::from).into();
    let (out, _) = homophone_substitute(&Transcript::from_text("fuck you", Language::En), &lex, &targets, 0)
        .map_err(|e| e.to_string())?;
    ensure!(out.render() == "folk you", "substitution gave `{}`", out.render());

    let t = Transcript::from_text("son of a bitch", Language::En);
    let stutter = benign_discontinuity_text(&t, &targets, "...", 3).map_err(|e| e.to_string())?;
    ensure!(
        stutter.render() == "son of a... a... a... bitch",
        "discontinuity gave `{}`",
        stutter.render()
    );

    let (clean, aligned) = sonomorph_harness::desk::Voice::desk().utterance("son of a bitch", 0.08, 0.3);
    let (gap_s, repeats) = (0.5, 3);
    let y = benign_discontinuity_audio(&clean, &aligned, &targets, gap_s, repeats).map_err(|e| e.to_string())?;
    let span = aligned.alignment.as_ref().unwrap()[2];
    let rate = f64::from(clean.sample_rate());
    let span_frames = (span.end_s * rate).round() - (span.start_s * rate).round();
    let expected = clean.frames() as f64 + (repeats - 1) as f64 * span_frames + repeats as f64 * (gap_s * rate).round();
    let diff = (y.frames() as f64 - expected).abs();
    ensure!(diff <= 1.0, "audio stutter has {} frames, expected {expected}", y.frames());
    Ok("\"folk you\", \"son of a... a... a... bitch\", splice length exact".into())
}

fn desk_campaign(out: &Path) -> Check {
    let start = Instant::now();
    let (report, _) = run_campaign(&workspace().join("assets/desk/campaign.json"), Some(out), None)
        .map_err(|e| e.to_string())?;
    within(start.elapsed(), 300)?;
    ensure!(report.status == CampaignStatus::Completed, "status {:?}", report.status);
    ensure!(report.cells.iter().all(Cell::is_balanced), "unbalanced cell");
    let identity: Vec<&Cell> = report.cells.iter().filter(|c| c.mr == "gain_0db").collect();
    ensure!(
        !identity.is_empty() && identity.iter().all(|c| c.efr == Some(0.0)),
        "identity cells {identity:?}"
    );
    let found = report.cells.iter().filter(|c| c.efr.is_some_and(|e| e > 0.0)).count();
    ensure!(found > 0, "no perturbation produced a miss");
    Ok(format!(
        "{} cells balanced, {found} with EFR > 0, identity at 0, {:.1?}",
        report.cells.len(),
        start.elapsed()
    ))
}

fn replay_determinism(recorded: &Path) -> Check {
    let scratch = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    let demo = scratch.path().join("demo");
    run_campaign(&workspace().join("assets/demo/campaign.json"), Some(&demo), None).map_err(|e| e.to_string())?;
    for (name, first) in [("desk", recorded.to_path_buf()), ("demo", demo)] {
        let again = scratch.path().join(format!("{name}_replay"));
        replay(&first.join("manifest.json"), &again, Some(2)).map_err(|e| e.to_string())?;
        for f in ["report.json", "report.csv"] {
            let a = std::fs::read(first.join(f)).map_err(|e| e.to_string())?;
            let b = std::fs::read(again.join(f)).map_err(|e| e.to_string())?;
            ensure!(a == b, "{name} {f} differs after replay");
            compared += 1;
        }
    }
    Ok(format!("{compared} report files byte-identical after replay"))
}

fn rate_limit() -> Check {
    let server = MockServer::start(|_, _| MockResponse::json(r#"{"label": "ok"}"#)).map_err(|e| e.to_string())?;
    let rate = 50.0;
    let template = HttpTemplate {
        endpoint: server.url("/moderate"),
        method: "POST".into(),
        headers: Default::default(),
        body: BodyTemplate::Json {
            template: json!({"audio": "{{audio_digest}}"}),
        },
        response: ResponseMapping {
            category_path: "label".into(),
            confidence_path: None,
            categories: [("ok".to_string(), Category::NonToxic)].into(),
        },
        rate_limit_per_s: rate,
        retry: RetryPolicy {
            max_attempts: 1,
            backoff_ms: 1,
        },
        timeout_s: 5.0,
    };
    let b = Arc::new(HttpBackend::new("api", template).map_err(|e| e.to_string())?);
    let clip = AudioBuffer::sine(440.0, 0.3, 0.02, 16_000).unwrap();
    std::thread::scope(|s| {
        for _ in 0..4 {
            let (b, clip) = (b.clone(), clip.clone());
            s.spawn(move || {
                for _ in 0..25 {
                    b.moderate(&clip, None).expect("mock answers");
                }
            });
        }
    });
    let mut at: Vec<Instant> = server.requests().iter().map(|r| r.at).collect();
    at.sort();
    ensure!(at.len() == 100, "{} requests observed", at.len());
    // Over every stretch of requests, count / elapsed stays within the limit
    // (2 ms allowance for socket scheduling jitter).
    let slack = Duration::from_millis(2);
    for i in 0..at.len() {
        for j in i + 1..at.len() {
            let needed = Duration::from_secs_f64((j - i) as f64 / rate);
            let seen = at[j] - at[i] + slack;
            ensure!(seen >= needed, "requests {i}..{j} arrived {:?} apart, limit needs {needed:?}", at[j] - at[i]);
        }
    }
    let span = (at[99] - at[0]).as_secs_f64();
    Ok(format!("100 requests, observed {:.1}/s against limit {rate}/s", 99.0 / span))
}

fn run(id: usize, name: &str, f: impl FnOnce() -> Check) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let elapsed = start.elapsed();
    match &outcome {
        Ok(detail) => println!("PASS  criterion {id}: {name}: {detail} [{elapsed:.2?}]"),
        Err(why) => println!("FAIL  criterion {id}: {name}: {why} [{elapsed:.2?}]"),
    }
    outcome.is_ok()
}

fn main() {
    let desk_out = tempfile::tempdir().expect("temp dir");
    let results = [
        run(1, "error finding rate exactness", efr_exactness),
        run(2, "seed filter protocol", seed_filter_protocol),
        run(3, "transform oracle suite", transform_oracles),
        run(4, "compound perturbation architecture", architecture),
        run(5, "tf-idf keyword ranking", tfidf),
        run(6, "linguistic perturbations", linguistic),
        run(7, "end-to-end offline campaign", || desk_campaign(desk_out.path())),
        run(8, "replay determinism", || replay_determinism(desk_out.path())),
        run(9, "rate limiting", rate_limit),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("{passed}/{} acceptance criteria passed", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
