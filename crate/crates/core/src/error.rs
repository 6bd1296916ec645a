use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a supported prime (need a prime between 2 and 97)")]
    InvalidPrime(u32),
    #[error("invalid generator `{name}`: {reason}")]
    InvalidGenerator { name: String, reason: String },
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("elements belong to different presentations")]
    MixedPresentations,
    #[error("degree {t} exceeds the window t_max = {t_max}")]
    OutsideWindow { t: i64, t_max: i64 },
    #[error("inconsistent input: {0}")]
    Inconsistent(String),
    #[error("differential undetermined on {0}")]
    Undetermined(String),
    #[error("conflicting differential on {class}: {existing} vs {proposed}")]
    Conflict { class: String, existing: String, proposed: String },
    #[error("class {0} is not present on the current page")]
    NotOnPage(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("window too small: {0}")]
    WindowTooSmall(String),
    #[error("verdict is OPEN; rerun with a truncation override to report the current page")]
    OpenVerdict,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
