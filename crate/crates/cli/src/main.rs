//! `sonomorph`: perturb clips, run moderation campaigns, calibrate the
//! reference spotter, rank keywords and render reports.
//!
//! Exit codes: 0 success, 1 usage error, 2 runtime error, 3 no seeds.
//! Machine-readable output goes to stdout, everything else to stderr.

mod error;
mod perturb;

use std::collections::HashSet;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use sonomorph_backend::calibrate::{calibrate, read_labeled};
use sonomorph_backend::{Execution, KeywordSpotter};
use sonomorph_harness::{export_retraining_set, replay, run_campaign, CampaignReport, CampaignStatus, Manifest};
use sonomorph_linguistic::{parse_corpus, parse_stopwords, select_keywords, Language};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "sonomorph", version, about = "Metamorphic testing of audio content moderation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply one perturbation to a clip and print its descriptor as JSON.
    Perturb(perturb::PerturbArgs),
    /// Run a campaign config, or replay a recorded manifest.
    Campaign(CampaignArgs),
    /// Fit the keyword spotter's threshold on a labeled clip listing.
    Calibrate(CalibrateArgs),
    /// Rank corpus words by TF-IDF; prints `token<TAB>score` lines.
    Keywords(KeywordsArgs),
    /// Render a campaign report.
    Report(ReportArgs),
    /// Split a campaign's test cases into balanced retraining sets.
    Export(ExportArgs),
}

#[derive(Debug, Args)]
struct CampaignArgs {
    /// Campaign config (JSON).
    #[arg(required_unless_present = "replay", conflicts_with = "replay")]
    config: Option<PathBuf>,
    /// Worker threads for generation and backend queries.
    #[arg(long, default_value_t = 4)]
    workers: usize,
    /// Output directory; defaults to the config's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-run a recorded manifest against its recorded answers.
    #[arg(long, value_name = "MANIFEST")]
    replay: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Directory of `<category>__<word>.wav` templates.
    templates: PathBuf,
    /// Listing of `path<TAB>category` lines.
    labeled: PathBuf,
    /// Fraction of clips held out for evaluation.
    #[arg(long, default_value_t = 0.25)]
    holdout: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    workers: usize,
    #[arg(long)]
    window: Option<f64>,
    #[arg(long)]
    hop: Option<f64>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Lang {
    En,
    Zh,
}

impl From<Lang> for Language {
    fn from(l: Lang) -> Self {
        match l {
            Lang::En => Language::En,
            Lang::Zh => Language::Zh,
        }
    }
}

#[derive(Debug, Args)]
struct KeywordsArgs {
    /// One document per line.
    corpus: PathBuf,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, value_enum, default_value_t = Lang::En)]
    lang: Lang,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// `report.json` written by a campaign.
    report: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct ExportArgs {
    /// `manifest.json` written by a campaign.
    manifest: PathBuf,
    /// Share of the smallest class per perturbation in each split.
    #[arg(long, default_value_t = 0.2)]
    fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Perturb(args) => perturb::run(args).map(|()| ExitCode::SUCCESS),
        Command::Campaign(args) => campaign(args),
        Command::Calibrate(args) => calibrate_cmd(args).map(|()| ExitCode::SUCCESS),
        Command::Keywords(args) => keywords(args).map(|()| ExitCode::SUCCESS),
        Command::Report(args) => report(args).map(|()| ExitCode::SUCCESS),
        Command::Export(args) => export(args).map(|()| ExitCode::SUCCESS),
    }
}

fn campaign(args: CampaignArgs) -> Result<ExitCode, CliError> {
    if args.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    let (report, out) = match (&args.replay, &args.config) {
        (Some(manifest), _) => {
            let out = args.out.clone().ok_or_else(|| CliError::Usage("--replay needs --out".into()))?;
            (replay(manifest, &out, Some(args.workers))?, out)
        }
        (None, Some(config)) => run_campaign(config, args.out.as_deref(), Some(args.workers))?,
        (None, None) => unreachable!("clap requires a config or --replay"),
    };
    eprint!("{}", report.to_table());
    let f = &report.seed_filter;
    eprintln!("seeds: {} of {} retained", f.retained, f.total);
    let summary = json!({
        "status": report.status,
        "report": out.join("report.json"),
        "csv": out.join("report.csv"),
        "manifest": out.join("manifest.json"),
        "version": report.version,
    });
    println!("{summary}");
    Ok(match report.status {
        CampaignStatus::Completed => ExitCode::SUCCESS,
        CampaignStatus::NoSeeds => {
            eprintln!("no seed was labeled with its declared category by any backend");
            ExitCode::from(3)
        }
    })
}

fn calibrate_cmd(args: CalibrateArgs) -> Result<(), CliError> {
    let mut spotter = KeywordSpotter::load("spotter", &args.templates)?;
    spotter.window_s = args.window;
    if let Some(h) = args.hop {
        spotter.hop_s = h;
    }
    let clips = read_labeled(&args.labeled)?;
    let c = calibrate(&spotter, &clips, args.holdout, args.seed, Execution::with_workers(args.workers))?;
    eprintln!(
        "threshold {:.4}: fit accuracy {:.3} on {} clips, held-out {}",
        c.threshold,
        c.fit_accuracy,
        c.fit_clips,
        c.heldout_accuracy.map_or("n/a".into(), |a| format!("{a:.3} on {} clips", c.heldout_clips))
    );
    println!("{}", serde_json::to_string(&c).expect("calibration serializes"));
    Ok(())
}

fn keywords(args: KeywordsArgs) -> Result<(), CliError> {
    let lang = Language::from(args.lang);
    let corpus = parse_corpus(&std::fs::read_to_string(&args.corpus)?, lang);
    if corpus.is_empty() {
        return Err(CliError::Usage(format!("{} holds no documents", args.corpus.display())));
    }
    let stop = match &args.stopwords {
        Some(p) => parse_stopwords(&std::fs::read_to_string(p)?, lang),
        None => HashSet::new(),
    };
    for k in select_keywords(&corpus, &stop, args.k)? {
        println!("{}\t{}", k.token, k.tf_idf);
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), CliError> {
    let r = CampaignReport::load(&args.report)?;
    match args.format {
        Format::Table => print!("{}", r.to_table()),
        Format::Csv => print!("{}", r.to_csv()?),
        Format::Json => print!("{}", r.to_json()),
    }
    Ok(())
}

fn export(args: ExportArgs) -> Result<(), CliError> {
    let manifest = Manifest::load(&args.manifest)?;
    let root = args.manifest.parent().map(PathBuf::from).unwrap_or_default();
    let set = export_retraining_set(&manifest, &root, args.fraction, args.seed)?;
    print!("{}", set.to_json());
    Ok(())
}
