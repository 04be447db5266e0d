use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use sonomorph_audio::wav::{from_pcm16, to_pcm16};
use sonomorph_audio::{content_digest, read_wav, write_wav, AudioBuffer};
use sonomorph_backend::exec::{self, Execution};
use sonomorph_backend::{Category, FixtureBackend, FixtureEntry, ModerationBackend};
use sonomorph_linguistic::Transcript;

use crate::config::CampaignConfig;
use crate::manifest::{BackendAnswer, CaseRecord, Manifest, SeedRecord, SkippedCase};
use crate::mr::{Applied, LinguisticEnv};
use crate::report::{BackendSeedStats, CampaignReport, CampaignStatus, Cell, SeedFilterReport, VERSION};
use crate::{HarnessError, Result};

pub const REPORT_JSON: &str = "report.json";
pub const REPORT_CSV: &str = "report.csv";
pub const MANIFEST: &str = "manifest.json";
pub const ARTIFACTS: &str = "artifacts";

#[derive(Debug, Clone, PartialEq)]
pub struct Seed {
    pub id: String,
    pub category: Category,
    pub audio: AudioBuffer,
    pub transcript: Option<Transcript>,
}

pub fn load_seeds(config: &CampaignConfig, base_dir: &Path) -> Result<Vec<Seed>> {
    config
        .seeds
        .iter()
        .map(|s| {
            let audio = read_wav(base_dir.join(&s.audio))?;
            let transcript = match &s.transcript {
                Some(p) => {
                    let t = Transcript::load(base_dir.join(p), config.language)?;
                    t.validate(Some(audio.duration_s()))?;
                    Some(t)
                }
                None => None,
            };
            Ok(Seed {
                id: s.id.clone(),
                category: s.category,
                audio,
                transcript,
            })
        })
        .collect()
}

fn ask(backend: &dyn ModerationBackend, audio: &AudioBuffer, hint: Option<&Transcript>) -> BackendAnswer {
    match backend.moderate(audio, hint) {
        Ok(v) => BackendAnswer {
            backend: backend.name().to_string(),
            verdict: Some(v),
            error: None,
        },
        Err(e) => BackendAnswer {
            backend: backend.name().to_string(),
            verdict: None,
            error: Some(e.to_string()),
        },
    }
}

/// Outcome of seed filtering: per seed, whether it is kept and what every
/// backend said.
#[derive(Debug, Clone, PartialEq)]
pub struct SeedFilter {
    pub retained: Vec<bool>,
    pub answers: Vec<Vec<BackendAnswer>>,
    pub report: SeedFilterReport,
}

/// Keeps a seed when at least one backend labels it with its declared
/// category. Fails only when no backend answered anything at all.
pub fn filter_seeds(seeds: &[Seed], backends: &[Arc<dyn ModerationBackend>], exec: Execution) -> Result<SeedFilter> {
    let pairs: Vec<(usize, usize)> = (0..seeds.len())
        .flat_map(|s| (0..backends.len()).map(move |b| (s, b)))
        .collect();
    let flat = exec::map(&pairs, exec, |&(s, b)| {
        ask(backends[b].as_ref(), &seeds[s].audio, seeds[s].transcript.as_ref())
    });
    if !flat.is_empty() && flat.iter().all(|a| a.verdict.is_none()) {
        return Err(HarnessError::AllBackendsUnavailable);
    }
    let answers: Vec<Vec<BackendAnswer>> = flat.chunks(backends.len()).map(<[_]>::to_vec).collect();
    let mut per_backend: Vec<BackendSeedStats> = backends
        .iter()
        .map(|b| BackendSeedStats {
            backend: b.name().to_string(),
            declared: 0,
            other_toxic: 0,
            non_toxic: 0,
            unavailable: 0,
        })
        .collect();
    let mut retained = Vec::with_capacity(seeds.len());
    let mut excluded = Vec::new();
    for (seed, row) in seeds.iter().zip(&answers) {
        let mut keep = false;
        for (stats, a) in per_backend.iter_mut().zip(row) {
            match a.category() {
                None => stats.unavailable += 1,
                Some(c) if c == seed.category => {
                    stats.declared += 1;
                    keep = true;
                }
                Some(Category::NonToxic) => stats.non_toxic += 1,
                Some(_) => stats.other_toxic += 1,
            }
        }
        if !keep {
            excluded.push(seed.id.clone());
        }
        retained.push(keep);
    }
    let report = SeedFilterReport {
        total: seeds.len(),
        retained: retained.iter().filter(|&&k| k).count(),
        excluded,
        per_backend,
    };
    Ok(SeedFilter {
        retained,
        answers,
        report,
    })
}

/// A campaign ready to run: config, loaded backends and linguistic inputs.
pub struct Campaign {
    pub config: CampaignConfig,
    pub base_dir: PathBuf,
    pub backends: Vec<Arc<dyn ModerationBackend>>,
    pub env: LinguisticEnv,
    pub exec: Execution,
    /// When set, regenerated artifacts must match these digests, keyed by
    /// (seed, perturbation name).
    pub expected_digests: Option<HashMap<(String, String), String>>,
}

impl Campaign {
    /// Builds every backend named in the config.
    pub fn prepare(config: CampaignConfig, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let base_dir = base_dir.into();
        let backends = config
            .backends
            .iter()
            .map(|b| b.build(&base_dir))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::with_backends(config, base_dir, backends)
    }

    /// Uses the given backends instead of the configured ones.
    pub fn with_backends(
        config: CampaignConfig,
        base_dir: impl Into<PathBuf>,
        backends: Vec<Arc<dyn ModerationBackend>>,
    ) -> Result<Self> {
        config.validate()?;
        let base_dir = base_dir.into();
        let env = config.linguistic_env(&base_dir)?;
        let exec = Execution::with_workers(config.workers);
        Ok(Self {
            config,
            base_dir,
            backends,
            env,
            exec,
            expected_digests: None,
        })
    }

    /// Runs the campaign, writing artifacts, `manifest.json`, `report.json`
    /// and `report.csv` under `output_dir`.
    pub fn run(&self, output_dir: &Path) -> Result<CampaignReport> {
        let seeds = load_seeds(&self.config, &self.base_dir)?;
        let filter = filter_seeds(&seeds, &self.backends, self.exec)?;
        std::fs::create_dir_all(output_dir.join(ARTIFACTS))?;

        let mut seed_records: Vec<SeedRecord> = seeds
            .iter()
            .zip(&filter.answers)
            .zip(&filter.retained)
            .map(|((s, answers), &retained)| SeedRecord {
                id: s.id.clone(),
                category: s.category,
                digest: content_digest(&s.audio),
                retained,
                answers: answers.clone(),
            })
            .collect();
        seed_records.sort_by(|a, b| a.id.cmp(&b.id));

        let kept: Vec<&Seed> = seeds.iter().zip(&filter.retained).filter(|(_, &k)| k).map(|(s, _)| s).collect();
        let jobs: Vec<(&Seed, usize)> = kept
            .iter()
            .flat_map(|&s| (0..self.config.mrs.len()).map(move |m| (s, m)))
            .collect();

        let generated = exec::map(&jobs, self.exec, |&(seed, m)| self.generate(seed, m, output_dir));
        let mut cases = Vec::new();
        let mut skipped = Vec::new();
        let mut audio = Vec::new();
        for (&(seed, m), outcome) in jobs.iter().zip(generated) {
            let mr = self.config.mrs[m].label().to_string();
            match outcome? {
                Ok((record, buffer, transcript)) => {
                    cases.push(record);
                    audio.push((buffer, transcript));
                }
                Err(reason) => skipped.push(SkippedCase {
                    seed: seed.id.clone(),
                    mr,
                    reason,
                }),
            }
        }

        let queries: Vec<(usize, usize)> = (0..cases.len())
            .flat_map(|c| (0..self.backends.len()).map(move |b| (c, b)))
            .collect();
        let answers = exec::map(&queries, self.exec, |&(c, b)| {
            let (buffer, transcript) = &audio[c];
            ask(self.backends[b].as_ref(), buffer, transcript.as_ref())
        });
        for (&(c, _), a) in queries.iter().zip(answers) {
            cases[c].answers.push(a);
        }

        let report = CampaignReport {
            version: VERSION.to_string(),
            status: if kept.is_empty() {
                CampaignStatus::NoSeeds
            } else {
                CampaignStatus::Completed
            },
            cells: self.aggregate(&kept, &cases)?,
            seed_filter: filter.report,
            manifest: MANIFEST.to_string(),
        };
        let manifest = Manifest {
            version: VERSION.to_string(),
            config: self.config.clone(),
            base_dir: self.base_dir.clone(),
            seeds: seed_records,
            cases,
            skipped,
        };
        std::fs::write(output_dir.join(MANIFEST), manifest.to_json())?;
        std::fs::write(output_dir.join(REPORT_JSON), report.to_json())?;
        std::fs::write(output_dir.join(REPORT_CSV), report.to_csv()?)?;
        Ok(report)
    }

    /// Outer error aborts the campaign; inner error skips the case.
    #[allow(clippy::type_complexity)]
    fn generate(
        &self,
        seed: &Seed,
        m: usize,
        output_dir: &Path,
    ) -> Result<std::result::Result<(CaseRecord, AudioBuffer, Option<Transcript>), String>> {
        let entry = &self.config.mrs[m];
        let g = match entry.mr.apply(&seed.audio, seed.transcript.as_ref(), &self.env) {
            Ok(Applied::Generated(g)) => g,
            Ok(Applied::NotApplicable(why)) => return Ok(Err(why)),
            Err(HarnessError::Config(msg)) => return Err(HarnessError::Config(msg)),
            Err(e) => return Ok(Err(e.to_string())),
        };
        // Backends hear exactly what the artifact file holds.
        let audio = g.audio.map_samples(|s| from_pcm16(to_pcm16(s)));
        let digest = content_digest(&audio);
        if let Some(expected) = &self.expected_digests {
            let key = (seed.id.clone(), entry.label().to_string());
            if let Some(want) = expected.get(&key) {
                if *want != digest {
                    return Err(HarnessError::ReplayMismatch {
                        case: format!("{}/{}", key.0, key.1),
                        expected: want.clone(),
                        actual: digest,
                    });
                }
            }
        }
        let artifact = format!("{ARTIFACTS}/{digest}.wav");
        write_artifact(&audio, &output_dir.join(&artifact))?;
        let record = CaseRecord {
            seed: seed.id.clone(),
            mr: entry.label().to_string(),
            descriptor: entry.mr.clone(),
            category: seed.category,
            artifact,
            digest,
            transcript: g.transcript.as_ref().map(Transcript::render),
            answers: Vec::new(),
        };
        Ok(Ok((record, audio, g.transcript)))
    }

    fn aggregate(&self, kept: &[&Seed], cases: &[CaseRecord]) -> Result<Vec<Cell>> {
        let mut categories: Vec<Category> = kept.iter().map(|s| s.category).collect();
        categories.sort();
        categories.dedup();
        let mut cells: BTreeMap<(usize, Category, usize), Cell> = BTreeMap::new();
        for (m, entry) in self.config.mrs.iter().enumerate() {
            for &c in &categories {
                for (b, backend) in self.backends.iter().enumerate() {
                    cells.insert((m, c, b), Cell::new(entry.label(), c, backend.name()));
                }
            }
        }
        let mr_index: HashMap<&str, usize> = self.config.mrs.iter().enumerate().map(|(i, e)| (e.label(), i)).collect();
        for case in cases {
            let m = mr_index[case.mr.as_str()];
            for (b, answer) in case.answers.iter().enumerate() {
                cells
                    .get_mut(&(m, case.category, b))
                    .expect("cell exists for every retained category")
                    .record(answer.category())?;
            }
        }
        Ok(cells.into_values().collect())
    }
}

/// Content-addressed write: an existing file with this name already holds
/// the same audio. Writes go through a temporary name so concurrent writers
/// never expose a partial file.
fn write_artifact(audio: &AudioBuffer, path: &Path) -> Result<()> {
    if path.exists() {
        return Ok(());
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    let fail = |source| HarnessError::ArtifactWrite {
        path: path.display().to_string(),
        source,
    };
    write_wav(audio, &tmp, 16).map_err(fail)?;
    std::fs::rename(&tmp, path).map_err(|e| fail(e.into()))?;
    Ok(())
}

/// Loads and runs a config file. `output_dir` overrides the config's own.
pub fn run_campaign(config_path: &Path, output_dir: Option<&Path>, workers: Option<usize>) -> Result<(CampaignReport, PathBuf)> {
    let (mut config, base) = CampaignConfig::load(config_path)?;
    if let Some(w) = workers {
        config.workers = w;
    }
    let out = output_dir.map_or_else(|| base.join(&config.output_dir), Path::to_path_buf);
    let report = Campaign::prepare(config, base)?.run(&out)?;
    Ok((report, out))
}

/// Recorded answers of one backend as a replayable fixture.
pub fn recorded_fixture(manifest: &Manifest, backend: &str) -> FixtureBackend {
    let mut fx = FixtureBackend::new(backend, BTreeMap::new());
    let seeds = manifest.seeds.iter().map(|s| (&s.digest, &s.answers));
    let cases = manifest.cases.iter().map(|c| (&c.digest, &c.answers));
    for (digest, answers) in seeds.chain(cases) {
        if let Some(v) = answers.iter().find(|a| a.backend == backend).and_then(|a| a.verdict.as_ref()) {
            fx.insert(
                digest.clone(),
                FixtureEntry {
                    category: v.category,
                    confidence: v.confidence,
                },
            );
        }
    }
    fx
}

/// Re-runs a recorded campaign with every backend replaced by its recorded
/// answers, checking that each artifact regenerates bit-identically.
pub fn replay(manifest_path: &Path, output_dir: &Path, workers: Option<usize>) -> Result<CampaignReport> {
    let manifest = Manifest::load(manifest_path)?;
    let mut config = manifest.config.clone();
    if let Some(w) = workers {
        config.workers = w;
    }
    let backends: Vec<Arc<dyn ModerationBackend>> = config
        .backends
        .iter()
        .map(|b| Arc::new(recorded_fixture(&manifest, b.name())) as Arc<dyn ModerationBackend>)
        .collect();
    let mut campaign = Campaign::with_backends(config, manifest.base_dir.clone(), backends)?;
    campaign.expected_digests = Some(
        manifest
            .cases
            .iter()
            .map(|c| ((c.seed.clone(), c.mr.clone()), c.digest.clone()))
            .collect(),
    );
    campaign.run(output_dir)
}
