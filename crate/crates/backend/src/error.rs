use std::io;

use sonomorph_audio::AudioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BackendError {
    /// The backend could not be reached or kept failing after all retries.
    #[error("backend unavailable: {0}")]
    Unavailable(String),
    #[error("no fixture recorded for digest {0}")]
    MissingFixture(String),
    /// The provider answered, but not in a shape the response mapping accepts.
    #[error("cannot map provider response: {0}")]
    Mapping(String),
    #[error("invalid backend configuration: {0}")]
    Config(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Io(#[from] io::Error),
}
