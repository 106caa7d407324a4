use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error at {path}: {message}")]
    Parse { path: String, message: String },
    #[error("invalid scenario at {path}: {message}")]
    Validation { path: String, message: String },
    #[error("{module}: {source}")]
    Module {
        module: &'static str,
        #[source]
        source: quasispec_core::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Tags a core error with the module it came from.
    pub fn module(module: &'static str, source: quasispec_core::Error) -> Self {
        Self::Module { module, source }
    }
}
