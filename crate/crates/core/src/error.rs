//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("parse error in {path} at {location}: {message}")]
    Parse {
        path: String,
        location: String,
        message: String,
    },
    #[error("duplicate question id {id}")]
    DuplicateQuestionId { id: u64 },
    #[error("question {id} has empty text")]
    EmptyQuestionText { id: u64 },
    #[error("score {value} for question {id} in system `{system}` is outside [0, 1]")]
    ScoreOutOfRange {
        id: u64,
        system: String,
        value: f64,
    },
    #[error("unknown question id {id}")]
    UnknownQuestion { id: u64 },
    #[error("performance row {id} has no matching question record")]
    UnmatchedRow { id: u64 },
    #[error("system index {index} out of range (have {count} systems)")]
    UnknownSystem { index: usize, count: usize },
    #[error("degenerate contingency table: {reason}")]
    DegenerateTable { reason: String },
    #[error("missing feature state for question {id}")]
    MissingFeatureState { id: u64 },
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("feature width mismatch: expected {expected}, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },
    #[error("unknown feature group `{0}`")]
    UnknownFeatureGroup(String),
    #[error("empty feature group selection")]
    EmptySelection,
    #[error("unknown classifier method `{0}`")]
    UnknownMethod(String),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("too few questions: need at least {needed}, have {have}")]
    TooFewQuestions { needed: usize, have: usize },
    #[error("unsupported model format version `{found}` (expected `{expected}`)")]
    ModelVersion { expected: String, found: String },
    #[error("model fingerprint mismatch: the model was trained on different inputs")]
    FingerprintMismatch,
    #[error("reports do not share a common dataset")]
    MismatchedFixture,
    #[error("no reports to compare")]
    NoReports,
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &str, location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            location: location.into(),
            message: message.into(),
        }
    }
}
