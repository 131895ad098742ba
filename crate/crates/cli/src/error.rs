use std::fmt;
use std::path::Path;

use normconflict_core::classifier::ClassifierError;
use normconflict_core::corpus::CorpusError;
use normconflict_core::embedding::EmbeddingError;
use normconflict_core::evaluation::EvalError;
use normconflict_core::extract::LexiconError;
use normconflict_service::ServiceError;

/// Process exit codes.
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_PIPELINE: u8 = 3;
pub const EXIT_SERVICE: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    /// Missing or unreadable inputs, malformed files, bad flags.
    Input(String),
    /// Failures inside embedding, training or evaluation.
    Pipeline(String),
    Service(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Pipeline(_) => EXIT_PIPELINE,
            CliError::Service(_) => EXIT_SERVICE,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    pub fn corpus(path: &Path, err: CorpusError) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    pub fn lexicon(path: &Path, err: LexiconError) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }

    /// A vectors file that exists but cannot be parsed is a pipeline error.
    pub fn vectors(path: &Path, err: EmbeddingError) -> Self {
        match err {
            EmbeddingError::Io(e) => CliError::io(path, e),
            other => CliError::Pipeline(format!("{}: {other}", path.display())),
        }
    }

    /// Unreadable or malformed model files are input errors.
    pub fn model(path: &Path, err: ClassifierError) -> Self {
        CliError::Input(format!("{}: {err}", path.display()))
    }
}

impl From<ClassifierError> for CliError {
    fn from(e: ClassifierError) -> Self {
        CliError::Pipeline(e.to_string())
    }
}

impl From<EmbeddingError> for CliError {
    fn from(e: EmbeddingError) -> Self {
        CliError::Pipeline(e.to_string())
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        CliError::Pipeline(e.to_string())
    }
}

impl From<ServiceError> for CliError {
    fn from(e: ServiceError) -> Self {
        match e {
            ServiceError::BindFailure { .. } => CliError::Service(e.to_string()),
            ServiceError::Corpus(_) | ServiceError::Io(_) => CliError::Input(e.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Pipeline(m) => write!(f, "pipeline error: {m}"),
            CliError::Service(m) => write!(f, "service error: {m}"),
        }
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;
