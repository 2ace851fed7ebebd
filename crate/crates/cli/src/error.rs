use spamqpt::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const USAGE: i32 = 1;
    pub const CHECK_FAILED: i32 = 2;
    pub const NUMERICAL: i32 = 3;
    pub const SHAPE_MISMATCH: i32 = 4;
    pub const SPAM_CORRECTION: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    ShapeMismatch(String),

    #[error("{context}: {source}")]
    Core {
        context: String,
        #[source]
        source: CoreError,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn core(context: impl Into<String>, source: CoreError) -> Self {
        Self::Core {
            context: context.into(),
            source,
        }
    }

    pub fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => exit::USAGE,
            CliError::ShapeMismatch(_) => exit::SHAPE_MISMATCH,
            CliError::Core { source, .. } => match source {
                CoreError::ShapeMismatch { .. } | CoreError::DimensionMismatch { .. } => {
                    exit::SHAPE_MISMATCH
                }
                CoreError::SpamTooLarge { .. } => exit::SPAM_CORRECTION,
                CoreError::InvalidData(_)
                | CoreError::ParameterOutOfRange { .. }
                | CoreError::ProbabilityOutOfRange { .. }
                | CoreError::MissingShots
                | CoreError::InvalidDimension(_)
                | CoreError::InvalidKets(_) => exit::USAGE,
                _ => exit::NUMERICAL,
            },
        }
    }

    /// Suggested remedy printed after the error message.
    pub fn hint(&self) -> Option<&'static str> {
        match self {
            CliError::ShapeMismatch(_) => Some(
                "the counts file must cover exactly the preparations, bases and outcomes of the design",
            ),
            CliError::Core { source, .. } => match source {
                CoreError::ShapeMismatch { .. } | CoreError::DimensionMismatch { .. } => Some(
                    "the counts file must cover exactly the preparations, bases and outcomes of the design",
                ),
                CoreError::SpamTooLarge { .. } => Some(
                    "the SPAM error has no fractional power; use --gauge-p 0 or --gauge-p 1, \
                     or recalibrate the preparations and measurements",
                ),
                CoreError::RankDeficient { .. } | CoreError::IllConditioned { .. } => Some(
                    "choose preparations and tracked effects that span the operator space",
                ),
                CoreError::MissingShots => Some("supply integer counts with their shot numbers"),
                _ => None,
            },
            _ => None,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
