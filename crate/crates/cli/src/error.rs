use std::path::PathBuf;

use webcas_core::cas::CasError;
use webcas_core::exchange::ExchangeError;
use webcas_core::webid::{CertificateError, IdentityError};
use webcas_server::ServerError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{path} already exists (use --force to overwrite)")]
    Exists { path: PathBuf },
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("identity: {0}")]
    Identity(String),
    #[error("{0}")]
    Cas(#[from] CasError),
    #[error("{0}")]
    Exchange(#[from] ExchangeError),
    #[error("{0}")]
    Server(ServerError),
    #[error("step {step} failed: {detail}")]
    Step { step: String, detail: String },
}

impl CliError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code. Argument errors exit with 2 (from clap).
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Exists { .. } => 4,
            CliError::Io { .. } => 5,
            CliError::Identity(_) => 6,
            CliError::Cas(_) => 7,
            CliError::Exchange(_) => 8,
            CliError::Server(_) => 9,
            CliError::Step { .. } => 10,
        }
    }

    /// Short machine-readable category for `--json` output.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Exists { .. } => "exists",
            CliError::Io { .. } => "io",
            CliError::Identity(_) => "identity",
            CliError::Cas(_) => "cas",
            CliError::Exchange(e) => e.category(),
            CliError::Server(_) => "server",
            CliError::Step { .. } => "workflow-step",
        }
    }
}

impl From<ServerError> for CliError {
    fn from(e: ServerError) -> Self {
        match e {
            ServerError::Config(m) => CliError::Config(m),
            ServerError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Server(other),
        }
    }
}

impl From<IdentityError> for CliError {
    fn from(e: IdentityError) -> Self {
        CliError::Identity(e.to_string())
    }
}

impl From<CertificateError> for CliError {
    fn from(e: CertificateError) -> Self {
        CliError::Identity(e.to_string())
    }
}
