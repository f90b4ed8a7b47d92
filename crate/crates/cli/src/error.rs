use std::path::PathBuf;

/// Exit status for a run whose report contains a failing check.
pub const EXIT_CHECK_FAILURE: u8 = 5;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}:{line}:{column}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        column: usize,
        message: String,
    },
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{op}: {left:?} does not conform to {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error(transparent)]
    Core(#[from] optfilter_core::Error),
}

impl CliError {
    /// 2 for unreadable input, 3 for shape errors, 4 for inputs that are not
    /// a valid model.
    pub fn exit_code(&self) -> u8 {
        use optfilter_core::Error as E;
        match self {
            CliError::Parse { .. } | CliError::Io { .. } | CliError::Usage(_) => 2,
            CliError::Dimension { .. } => 3,
            CliError::Core(e) => match e {
                E::NonFinite { .. } | E::EmptySampleSet => 2,
                E::DimensionMismatch { .. }
                | E::NotSquare { .. }
                | E::RankExceeded { .. }
                | E::InsufficientOmega { .. } => 3,
                _ => 4,
            },
        }
    }
}
