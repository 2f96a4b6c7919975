use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] renorm_core::Error),
}

impl CliError {
    /// 1 for a failed verification or a numerical failure, 2 for bad
    /// configuration, budgets and unwritable output.
    pub fn exit_code(&self) -> i32 {
        use renorm_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Core(E::Budget(_) | E::Level { .. } | E::UnknownName(_) | E::Insufficient(_)) => 2,
            CliError::Verification(_) | CliError::Core(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Verification(_) => "verification",
            CliError::Io(_) => "io",
            CliError::Core(renorm_core::Error::Budget(_)) => "budget",
            CliError::Core(_) => "core",
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() } })
    }
}
