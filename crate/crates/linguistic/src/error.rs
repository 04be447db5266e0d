use std::io;

use sonomorph_audio::AudioError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinguisticError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("speech synthesis failed: {0}")]
    Synthesis(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
    #[error(transparent)]
    Io(#[from] io::Error),
}
