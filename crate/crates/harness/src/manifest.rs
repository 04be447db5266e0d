use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sonomorph_backend::{Category, Verdict};

use crate::config::CampaignConfig;
use crate::mr::MrSpec;
use crate::Result;

/// One backend's answer for one clip.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackendAnswer {
    pub backend: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    /// Why no verdict was obtained.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl BackendAnswer {
    pub fn category(&self) -> Option<Category> {
        self.verdict.as_ref().map(|v| v.category)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub id: String,
    pub category: Category,
    pub digest: String,
    pub retained: bool,
    pub answers: Vec<BackendAnswer>,
}

/// A generated test case. `artifact` is relative to the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub seed: String,
    pub mr: String,
    pub descriptor: MrSpec,
    pub category: Category,
    pub artifact: String,
    pub digest: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcript: Option<String>,
    pub answers: Vec<BackendAnswer>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedCase {
    pub seed: String,
    pub mr: String,
    pub reason: String,
}

/// Everything needed to audit or replay a campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config: CampaignConfig,
    /// Directory the config's relative paths resolve against.
    pub base_dir: PathBuf,
    pub seeds: Vec<SeedRecord>,
    pub cases: Vec<CaseRecord>,
    pub skipped: Vec<SkippedCase>,
}

impl Manifest {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes") + "\n"
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}
