use std::path::PathBuf;

/// Errors produced anywhere in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("precision error: {0}")]
    Precision(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("state error: {0}")]
    State(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported architecture: {0}")]
    UnsupportedArchitecture(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("degenerate component: {0}")]
    DegenerateComponent(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("training diverged at iteration {iteration}: loss = {loss}")]
    Divergence { iteration: usize, loss: f64 },

    #[error("unknown key: {0}")]
    UnknownKey(String),

    #[error("type mismatch for key `{key}`: expected {expected}, got `{value}`")]
    TypeMismatch {
        key: String,
        expected: &'static str,
        value: String,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short stable tag for machine-readable reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Precision(_) => "precision",
            Error::Shape(_) => "shape",
            Error::State(_) => "state",
            Error::Config(_) => "config",
            Error::UnsupportedArchitecture(_) => "unsupported-architecture",
            Error::Fit(_) => "fit",
            Error::DegenerateComponent(_) => "degenerate-component",
            Error::Precondition(_) => "precondition",
            Error::Divergence { .. } => "divergence",
            Error::UnknownKey(_) => "unknown-key",
            Error::TypeMismatch { .. } => "type-mismatch",
            Error::Format(_) => "format",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
