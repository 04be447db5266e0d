use std::io;

use sonomorph_audio::AudioError;
use sonomorph_backend::BackendError;
use sonomorph_linguistic::LinguisticError;
use sonomorph_mr_basic::MrError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid campaign config: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    /// A counting invariant was violated, e.g. more misclassified cases than
    /// answered ones.
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("every backend was unavailable during seed filtering")]
    AllBackendsUnavailable,
    #[error("cannot write artifact {path}: {source}")]
    ArtifactWrite { path: String, source: AudioError },
    #[error("replayed artifact for {case} has digest {actual}, manifest says {expected}")]
    ReplayMismatch {
        case: String,
        expected: String,
        actual: String,
    },
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Perturbation(#[from] MrError),
    #[error(transparent)]
    Linguistic(#[from] LinguisticError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}
