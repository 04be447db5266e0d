use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AudioError {
    #[error("invalid audio buffer: {0}")]
    InvalidBuffer(String),
    #[error("malformed WAV data: {0}")]
    Format(String),
    #[error("unsupported codec: {0}")]
    UnsupportedCodec(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}
