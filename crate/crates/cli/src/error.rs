use emomodes::classifiers::ClassifierError;
use emomodes::corpus::CorpusError;
use emomodes::eval::EvalError;
use emomodes::features::FeatureError;
use emomodes::lexicons::LexiconError;
use emomodes::llm::{LlmError, PromptError};

/// Exit status 1: bad input or a failed check.
pub const EXIT_VALIDATION: i32 = 1;
/// Exit status 2: file system or backend failure.
pub const EXIT_IO: i32 = 2;
/// Exit status 64: malformed command line.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// Prefixes the message with the file or step it concerns.
    pub fn context(self, what: impl std::fmt::Display) -> Self {
        match self {
            CliError::Validation(m) => CliError::Validation(format!("{what}: {m}")),
            CliError::Io(m) => CliError::Io(format!("{what}: {m}")),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            CliError::Io(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

macro_rules! split_io {
    ($($ty:ty),*) => {$(
        impl From<$ty> for CliError {
            fn from(e: $ty) -> Self {
                type E = $ty;
                match e {
                    E::Io(io) => CliError::Io(io.to_string()),
                    other => CliError::Validation(other.to_string()),
                }
            }
        }
    )*};
}

split_io!(CorpusError, ClassifierError, EvalError, FeatureError, LexiconError, PromptError);

impl From<LlmError> for CliError {
    fn from(e: LlmError) -> Self {
        match e {
            LlmError::Backend(_) | LlmError::Io(_) => CliError::Io(e.to_string()),
            LlmError::Prompt(p) => p.into(),
            LlmError::Predictions(p) => p.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}
