use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure the toolkit can report. Variants map onto the `kind`
/// field of the CLI's machine-readable error JSON.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alignment error: {0}")]
    Alignment(String),

    #[error("frequency mismatch: {0}")]
    Frequency(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("singular design: {0}")]
    SingularDesign(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dangling reference: label for unknown headline `{0}`")]
    Referential(String),

    #[error("duplicate record: {0}")]
    Duplicate(String),

    #[error("zero denominator: period {0} has no headlines")]
    ZeroDenominator(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("transport error for headline `{headline_id}`: {message}")]
    Transport { headline_id: String, message: String },

    #[error("invalid configuration: {}", .0.join("; "))]
    Config(Vec<String>),

    #[error("oracle suite failed: {}", .0.join(", "))]
    OracleFailure(Vec<String>),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Stable short name used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Alignment(_) => "alignment",
            Error::Frequency(_) => "frequency",
            Error::InsufficientData(_) => "insufficient_data",
            Error::Degenerate(_) => "degenerate",
            Error::SingularDesign(_) => "singular_design",
            Error::Domain(_) => "domain",
            Error::Referential(_) => "referential",
            Error::Duplicate(_) => "duplicate",
            Error::ZeroDenominator(_) => "zero_denominator",
            Error::Parse(_) => "parse",
            Error::Transport { .. } => "transport",
            Error::Config(_) => "config",
            Error::OracleFailure(_) => "oracle_failure",
            Error::Io { .. } => "io",
            Error::Csv(_) => "csv",
            Error::Json(_) => "json",
        }
    }
}
