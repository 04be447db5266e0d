//! Campaign engine: filters seed clips through the moderation backends,
//! applies every configured perturbation, re-queries the backends and
//! aggregates error finding rates per perturbation, category and backend.

pub mod campaign;
pub mod config;
pub mod desk;
pub mod export;
pub mod manifest;
pub mod mr;
pub mod report;

mod error;

pub use campaign::{filter_seeds, load_seeds, recorded_fixture, replay, run_campaign, Campaign, Seed, SeedFilter};
pub use config::{CampaignConfig, KeywordSelection, MrEntry, SeedSpec, TtsConfig};
pub use error::HarnessError;
pub use export::{export_retraining_set, ExportEntry, RetrainingSet, Split};
pub use manifest::{BackendAnswer, CaseRecord, Manifest, SeedRecord, SkippedCase};
pub use mr::{Applied, Generated, LinguisticEnv, LinguisticPerturbation, MrSpec};
pub use report::{compute_efr, BackendSeedStats, CampaignReport, CampaignStatus, Cell, SeedFilterReport, VERSION};

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
