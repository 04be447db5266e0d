use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sonomorph_backend::Category;

use crate::manifest::Manifest;
use crate::mr::MrSpec;
use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExportEntry {
    pub artifact: PathBuf,
    pub label: Category,
    pub mr: String,
    pub descriptor: MrSpec,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RetrainingSet {
    pub fraction: f64,
    pub seed: u64,
    pub entries: Vec<ExportEntry>,
}

impl RetrainingSet {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("export serializes") + "\n"
    }

    pub fn count(&self, mr: &str, label: Category, split: Split) -> usize {
        self.entries
            .iter()
            .filter(|e| e.mr == mr && e.label == label && e.split == split)
            .count()
    }
}

/// Splits the generated cases into balanced test and train sets.
///
/// Within each perturbation every category contributes the same number of
/// cases: `round(fraction · n_min)` to the test split and as many again to
/// the train split, where `n_min` is the smallest category in that
/// perturbation. Cases are picked by a shuffle seeded with `seed`, so the
/// same inputs always give the same export. Artifact paths are joined onto
/// `artifact_root` (normally the manifest's directory).
pub fn export_retraining_set(manifest: &Manifest, artifact_root: &Path, fraction: f64, seed: u64) -> Result<RetrainingSet> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(HarnessError::Parameter(format!("split fraction {fraction} must lie in (0, 1)")));
    }
    let mut strata: BTreeMap<(&str, Category), Vec<usize>> = BTreeMap::new();
    for (i, c) in manifest.cases.iter().enumerate() {
        strata.entry((c.mr.as_str(), c.category)).or_default().push(i);
    }
    let mut smallest: BTreeMap<&str, usize> = BTreeMap::new();
    for (&(mr, _), cases) in &strata {
        let n = smallest.entry(mr).or_insert(usize::MAX);
        *n = (*n).min(cases.len());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for ((mr, category), mut cases) in strata {
        let quota = (fraction * smallest[mr] as f64).round() as usize;
        cases.shuffle(&mut rng);
        let test = quota.min(cases.len());
        let train = quota.min(cases.len() - test);
        for (k, &i) in cases[..test + train].iter().enumerate() {
            let case = &manifest.cases[i];
            entries.push(ExportEntry {
                artifact: artifact_root.join(&case.artifact),
                label: category,
                mr: mr.to_string(),
                descriptor: case.descriptor.clone(),
                split: if k < test { Split::Test } else { Split::Train },
            });
        }
    }
    Ok(RetrainingSet { fraction, seed, entries })
}
