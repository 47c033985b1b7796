use phasedetect_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("{failed} of {total} checks failed")]
    Verification { failed: usize, total: usize },
    #[error("output: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn invalid(msg: impl Into<String>) -> Self {
        CliError::Validation(msg.into())
    }

    /// Output consumer went away (e.g. `| head`); not worth reporting.
    pub fn is_broken_pipe(&self) -> bool {
        let io = match self {
            CliError::Io(e) => Some(e),
            CliError::Csv(e) => match e.kind() {
                csv::ErrorKind::Io(e) => Some(e),
                _ => None,
            },
            _ => None,
        };
        io.is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
    }

    /// 1 validation, 2 computation, 3 verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Core(e) if is_input_error(e) => 1,
            CliError::Core(_) | CliError::Io(_) | CliError::Csv(_) => 2,
            CliError::Verification { .. } => 3,
        }
    }
}

fn is_input_error(e: &CoreError) -> bool {
    match e {
        CoreError::AtPoint { source, .. } => is_input_error(source),
        CoreError::InvalidSpace { .. }
        | CoreError::InvalidEfficiency(_)
        | CoreError::InvalidArgument { .. }
        | CoreError::InvalidParams(_)
        | CoreError::AnalyticUnavailable { .. }
        | CoreError::LevelOutOfRange { .. } => true,
        _ => false,
    }
}
