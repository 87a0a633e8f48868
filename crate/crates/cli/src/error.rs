use oodg::Error;

/// Failure of a command, carrying the process exit code it maps to.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub mod exit {
    /// Bad flags, bad configuration values, out-of-range parameters.
    pub const USAGE: i32 = 2;
    /// Unreadable, malformed or unwritable files.
    pub const IO: i32 = 3;
    /// Inputs with the wrong shape or content for the requested stage.
    pub const DATA: i32 = 4;
    /// Graph construction or clustering could not proceed.
    pub const GRAPH: i32 = 5;
    /// A covariance could not be factored.
    pub const NUMERIC: i32 = 6;
    /// The model lacks a threshold the command needs.
    pub const UNCALIBRATED: i32 = 7;
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self::Usage(message.into())
    }

    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Self::Io {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => exit::USAGE,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                Error::InvalidArgument(_) => exit::USAGE,
                Error::Io(_)
                | Error::BadMagic { .. }
                | Error::UnsupportedVersion { .. }
                | Error::TruncatedFile { .. }
                | Error::Csv { .. }
                | Error::Json(_)
                | Error::NonFiniteValue { .. } => exit::IO,
                Error::TooFewNodes { .. }
                | Error::KTooLarge { .. }
                | Error::EmptyGraph
                | Error::UnassignedNode(_)
                | Error::AllNodesIsolated
                | Error::IndexOutOfRange { .. }
                | Error::SamePair(_) => exit::GRAPH,
                Error::NotPositiveDefinite { .. } => exit::NUMERIC,
                Error::Uncalibrated => exit::UNCALIBRATED,
                _ => exit::DATA,
            },
        }
    }
}
