//! Systems under test. Every backend answers [`ModerationBackend::moderate`]
//! with one [`Verdict`] or one typed error: remote APIs through
//! [`HttpBackend`], recorded answers through [`FixtureBackend`], and a local
//! MFCC+DTW [`KeywordSpotter`] for fully offline runs.

pub mod calibrate;
mod config;
mod dtw;
mod error;
pub mod exec;
mod fixture;
pub mod http;
pub mod mfcc;
pub mod mock;
pub mod spotter;
mod verdict;

pub use calibrate::{calibrate, Calibration};
pub use config::BackendConfig;
pub use dtw::dtw_distance;
pub use error::BackendError;
pub use exec::Execution;
pub use fixture::{FixtureBackend, FixtureEntry, Recorder};
pub use http::{HttpBackend, HttpTemplate, RateLimiter};
pub use mfcc::{extract_mfcc, MfccExtractor, MfccVector};
pub use spotter::KeywordSpotter;
pub use verdict::{Category, ModerationBackend, Verdict};

pub type Result<T, E = BackendError> = std::result::Result<T, E>;
