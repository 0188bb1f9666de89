use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("glyph has no foreground pixels{}", sample_suffix(.0))]
    EmptyGlyph(Option<String>),

    #[error("linear system is numerically singular ({0})")]
    SingularSystem(&'static str),

    #[error("dimension mismatch: expected {expected}, got {actual} ({context})")]
    DimensionMismatch {
        expected: usize,
        actual: usize,
        context: &'static str,
    },

    #[error("missing metadata for {scheme} folds: {what}")]
    MissingMetadata { scheme: &'static str, what: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("class {class} has no training samples")]
    EmptyClass { class: String },

    #[error("report has no folds to aggregate")]
    EmptyReport,

    #[error("cannot decode image {path}: {reason}")]
    Decode { path: PathBuf, reason: String },

    #[error("manifest error: {0}")]
    Manifest(String),

    #[error("corrupt model file: {0}")]
    CorruptModel(String),

    #[error("model file version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

fn sample_suffix(sample: &Option<String>) -> String {
    match sample {
        Some(s) => format!(" (sample {s})"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
