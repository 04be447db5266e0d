use sonomorph_audio::AudioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MrError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
}
