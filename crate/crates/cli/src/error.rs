use std::path::PathBuf;

use quasiecho_core::CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            Self::Config(_) | Self::Core(CoreError::InvalidParameter(_)) => "config",
            Self::Io { .. } | Self::Core(CoreError::Io(_)) => "io",
            Self::Core(_) => "numeric",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind() {
            "config" => 2,
            "numeric" => 3,
            _ => 4,
        }
    }

    /// One-line machine-readable form for standard error.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "error": self.kind(), "code": self.exit_code(), "message": self.to_string() }).to_string()
    }
}

pub fn config(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
