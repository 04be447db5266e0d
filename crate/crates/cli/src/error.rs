use sonomorph_audio::AudioError;
use sonomorph_backend::BackendError;
use sonomorph_harness::HarnessError;
use sonomorph_linguistic::LinguisticError;
use sonomorph_mr_basic::MrError;
use thiserror::Error;

/// Failures split by exit code: bad input from the operator versus
/// something that went wrong while doing the work.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

impl From<MrError> for CliError {
    fn from(e: MrError) -> Self {
        match e {
            MrError::Parameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<LinguisticError> for CliError {
    fn from(e: LinguisticError) -> Self {
        match e {
            LinguisticError::Parameter(_) | LinguisticError::Parse { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<BackendError> for CliError {
    fn from(e: BackendError) -> Self {
        match e {
            BackendError::Config(_) => CliError::Usage(e.to_string()),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(_) | HarnessError::Parameter(_) => CliError::Usage(e.to_string()),
            HarnessError::Perturbation(inner) => inner.into(),
            HarnessError::Linguistic(inner) => inner.into(),
            HarnessError::Backend(inner) => inner.into(),
            _ => CliError::Runtime(e.to_string()),
        }
    }
}

impl From<AudioError> for CliError {
    fn from(e: AudioError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}
