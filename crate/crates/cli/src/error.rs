use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{message}\n\n{usage}")]
    Usage { message: String, usage: String },
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Compute(#[from] modeweaver::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage { .. } | CliError::Config(_) | CliError::Write { .. } => {
                ExitCode::from(2)
            }
            CliError::Compute(_) => ExitCode::from(3),
        }
    }
}
