use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("image has no pixels")]
    EmptyImage,

    #[error("invalid dimensions {width}x{height} for {len} pixels")]
    InvalidDimensions {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("mask selects no pixels (no region)")]
    EmptyRegion,

    #[error("channel {0} is not available for this pixel type")]
    ChannelUnavailable(&'static str),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0} image set is empty")]
    EmptySet(&'static str),

    #[error("ROC curve has no points")]
    EmptyCurve,

    #[error("invalid ROC curve: {0}")]
    InvalidCurve(String),

    #[error("{}: file not found", path.display())]
    NotFound { path: PathBuf },

    #[error("{}: unsupported image format", path.display())]
    UnsupportedFormat { path: PathBuf },

    #[error("{}: corrupt image data: {message}", path.display())]
    CorruptImage { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: encode failed: {message}", path.display())]
    Encode { path: PathBuf, message: String },

    #[error("{}:{line}: malformed manifest line: {message}", path.display())]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{}:{line}: unknown label '{label}'", path.display())]
    UnknownLabel {
        path: PathBuf,
        line: usize,
        label: String,
    },

    #[error("{}:{line}: duplicate image path '{entry}'", path.display())]
    DuplicatePath {
        path: PathBuf,
        line: usize,
        entry: String,
    },

    #[error("{}: image '{entry}' is already listed by an earlier manifest", path.display())]
    RepeatedAcrossManifests { path: PathBuf, entry: String },
}

impl Error {
    /// True for failures that come from reading or decoding files.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            Error::NotFound { .. }
                | Error::UnsupportedFormat { .. }
                | Error::CorruptImage { .. }
                | Error::Io { .. }
                | Error::Encode { .. }
        )
    }
}
