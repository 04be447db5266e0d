use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Map, Value};
use sonomorph_audio::{content_digest, read_wav, write_wav};
use sonomorph_harness::{Applied, LinguisticEnv, MrSpec};
use sonomorph_linguistic::tts::WordBank;
use sonomorph_linguistic::{HomophoneLexicon, Transcript};

use crate::error::CliError;
use crate::Lang;

/// Perturbation parameters. Only the flags the chosen perturbation takes
/// may be given; each maps onto the descriptor field of the same meaning.
#[derive(Debug, Args)]
pub struct PerturbArgs {
    /// Perturbation kind, e.g. `gain`, `time-stretch`, `ring-mod`.
    #[arg(long)]
    mr: String,
    input: PathBuf,
    output: PathBuf,

    #[arg(long, help_heading = "Amplitude")]
    db: Option<f64>,
    #[arg(long, help_heading = "Time")]
    factor: Option<f64>,
    #[arg(long, allow_hyphen_values = true, help_heading = "Time")]
    seconds: Option<f64>,
    #[arg(long, allow_hyphen_values = true, help_heading = "Space")]
    position: Option<f64>,
    #[arg(long, help_heading = "Space")]
    rotation_hz: Option<f64>,
    #[arg(long, allow_hyphen_values = true, help_heading = "Frequency")]
    semitones: Option<f64>,
    /// Target signal-to-noise ratio in dB.
    #[arg(long, allow_hyphen_values = true, help_heading = "Injection")]
    snr: Option<f64>,
    #[arg(long, help_heading = "Injection")]
    seed: Option<u64>,
    #[arg(long, help_heading = "Injection")]
    start: Option<f64>,
    #[arg(long, help_heading = "Injection")]
    end: Option<f64>,
    #[arg(long, help_heading = "Injection")]
    count: Option<usize>,
    #[arg(long, allow_hyphen_values = true, help_heading = "Compound")]
    threshold_db: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    ratio: Option<f64>,
    /// Ring modulation carrier in Hz.
    #[arg(long, help_heading = "Compound")]
    carrier: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    cutoff: Option<f64>,
    #[arg(long, allow_hyphen_values = true, help_heading = "Compound")]
    gain_db: Option<f64>,
    /// Tremolo rate in Hz.
    #[arg(long, help_heading = "Compound")]
    rate: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    depth: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    clip_threshold: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    drive: Option<f64>,
    /// Echo delay in seconds.
    #[arg(long, help_heading = "Compound")]
    delay: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    decay: Option<f64>,
    #[arg(long, help_heading = "Compound")]
    taps: Option<usize>,
    #[arg(long, help_heading = "Compound")]
    intensity: Option<f64>,
    /// Reverb tail length in seconds.
    #[arg(long, help_heading = "Compound")]
    duration: Option<f64>,

    /// Pause inserted by audio discontinuity, in seconds.
    #[arg(long, help_heading = "Linguistic")]
    gap: Option<f64>,
    #[arg(long, help_heading = "Linguistic")]
    repeats: Option<usize>,
    #[arg(long, help_heading = "Linguistic")]
    marker: Option<String>,
    /// Transcript of the input, one token per line (optionally aligned).
    #[arg(long, help_heading = "Linguistic")]
    transcript: Option<PathBuf>,
    /// Comma-separated words to act on.
    #[arg(long, value_delimiter = ',', help_heading = "Linguistic")]
    targets: Vec<String>,
    /// Extra homophone entries.
    #[arg(long, help_heading = "Linguistic")]
    lexicon: Option<PathBuf>,
    /// Directory of `<word>.wav` recordings used to voice text output.
    #[arg(long, help_heading = "Linguistic")]
    voice: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Lang::En, help_heading = "Linguistic")]
    lang: Lang,
}

impl PerturbArgs {
    /// The descriptor JSON object: `kind` plus every given parameter.
    fn descriptor(&self) -> Value {
        let kind = match self.mr.replace('-', "_").as_str() {
            "noise" => "noise_injection".to_string(),
            "homophone" => "homophone_substitution".to_string(),
            other => other.to_string(),
        };
        let mut m = Map::new();
        m.insert("kind".into(), json!(kind));
        let numbers = [
            ("db", self.db),
            ("factor", self.factor),
            ("seconds", self.seconds),
            ("position", self.position),
            ("rotation_hz", self.rotation_hz),
            ("semitones", self.semitones),
            ("target_snr_db", self.snr),
            ("start_s", self.start),
            ("end_s", self.end),
            ("threshold_db", self.threshold_db),
            ("ratio", self.ratio),
            ("carrier_hz", self.carrier),
            ("cutoff_hz", self.cutoff),
            ("gain_db", self.gain_db),
            ("rate_hz", self.rate),
            ("depth", self.depth),
            ("clip_threshold", self.clip_threshold),
            ("drive", self.drive),
            ("delay_s", self.delay),
            ("decay", self.decay),
            ("intensity", self.intensity),
            ("duration_s", self.duration),
            ("gap_s", self.gap),
        ];
        for (k, v) in numbers {
            if let Some(v) = v {
                m.insert(k.into(), json!(v));
            }
        }
        let others = [
            ("seed", self.seed.map(|s| json!(s))),
            ("count", self.count.map(|c| json!(c))),
            ("taps", self.taps.map(|t| json!(t))),
            ("repeats", self.repeats.map(|r| json!(r))),
            ("marker", self.marker.as_ref().map(|s| json!(s))),
        ];
        for (k, v) in others {
            if let Some(v) = v {
                m.insert(k.into(), v);
            }
        }
        Value::Object(m)
    }
}

pub fn run(args: PerturbArgs) -> Result<(), CliError> {
    let mr: MrSpec = serde_json::from_value(args.descriptor()).map_err(|e| CliError::Usage(e.to_string()))?;
    let lang = args.lang.into();
    let audio = read_wav(&args.input)?;
    let transcript = match &args.transcript {
        Some(p) => Some(Transcript::load(p, lang)?),
        None => None,
    };
    let mut env = LinguisticEnv::new(lang);
    if let Some(p) = &args.lexicon {
        env.lexicon.extend(HomophoneLexicon::load(p, lang)?)?;
    }
    env.targets = args.targets.iter().map(|t| lang.normalize(t.trim())).collect();
    if let Some(dir) = &args.voice {
        env.synthesizer = Some(Box::new(WordBank::load(dir, lang)?));
    }
    if matches!(mr, MrSpec::Linguistic(_)) && env.targets.is_empty() {
        return Err(CliError::Usage(format!("`{}` needs --targets", mr.name())));
    }
    let generated = match mr.apply(&audio, transcript.as_ref(), &env)? {
        Applied::Generated(g) => g,
        Applied::NotApplicable(why) => return Err(CliError::Runtime(format!("`{}` does not apply: {why}", mr.name()))),
    };
    write_wav(&generated.audio, &args.output, 16)?;
    let stored = read_wav(&args.output)?;
    let out = json!({
        "mr": mr,
        "input": args.input,
        "output": args.output,
        "digest": content_digest(&stored),
        "transcript": generated.transcript.as_ref().map(Transcript::render),
    });
    println!("{out}");
    Ok(())
}
