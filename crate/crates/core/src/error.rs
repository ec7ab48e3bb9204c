use std::path::PathBuf;

use crate::bulletin::InvariantReport;
use crate::combiner::FailureReport;
use crate::model::StructureViolations;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParams { field: &'static str, reason: String },

    #[error("unsupported hash function `{0}`")]
    UnsupportedHash(String),

    #[error("{what} index {index} is outside 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: u32,
        max: u32,
    },

    #[error("{what} must be {expected} bits, got {actual}")]
    Length {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("random source failed: {0}")]
    EntropyFailure(String),

    #[error("no share for participant {0}")]
    MissingShare(u32),

    #[error("duplicate {what} index {index}")]
    Duplicate { what: &'static str, index: u32 },

    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),

    #[error("unknown secret {0}")]
    UnknownSecret(u32),

    #[error("no row ({secret_index}, {set_position}) in the bulletin")]
    UnknownRow {
        secret_index: u32,
        set_position: u32,
    },

    #[error("participant {participant} is not a member of qualified set ({secret_index}, {set_position})")]
    NotAuthorized {
        participant: u32,
        secret_index: u32,
        set_position: u32,
    },

    #[error(
        "no verification entry for participant {participant} at ({secret_index}, {set_position})"
    )]
    NoSuchEntry {
        participant: u32,
        secret_index: u32,
        set_position: u32,
    },

    #[error("invalid access structure for secret {secret_index}: {violations}")]
    InvalidStructure {
        secret_index: u32,
        violations: StructureViolations,
    },

    #[error("reconstruction failed: {0}")]
    ReconstructionFailed(FailureReport),

    #[error("bulletin invariants violated: {0}")]
    InvariantViolation(InvariantReport),

    #[error("scheme fingerprint mismatch: expected {expected}, found {found}")]
    FingerprintMismatch { expected: String, found: String },

    #[error("unsupported file format {format} version {version}")]
    VersionUnsupported { format: String, version: u64 },

    /// `line` and `column` are 1-based; zero when the error has no source location.
    #[error("parse error: {message}")]
    Parse {
        message: String,
        line: usize,
        column: usize,
    },

    #[error("invalid hex: {0}")]
    Hex(#[from] hex::FromHexError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(message: impl Into<String>) -> Self {
        Error::Parse {
            message: message.into(),
            line: 0,
            column: 0,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Parse {
            message: err.to_string(),
            line: err.line(),
            column: err.column(),
        }
    }
}
