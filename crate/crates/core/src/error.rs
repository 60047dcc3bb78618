use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown shift symbol {0:?}")]
    UnknownSymbol(String),
    #[error("malformed month {0:?}")]
    MalformedMonth(String),
    #[error("date {0} lies outside the calendar window")]
    DateOutsideWindow(chrono::NaiveDate),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("bound {field}: lower {lb} exceeds upper {ub}")]
    BoundOrder { field: String, lb: u32, ub: u32 },
    #[error("unknown nurse {0:?}")]
    UnknownNurse(String),
    #[error("unknown constraint id {0:?}")]
    UnknownConstraint(String),
    #[error("constraint {id} is {expected}, not {actual}")]
    WrongKind { id: String, expected: &'static str, actual: &'static str },
    #[error("cell ({nurse}, {date}) holds {symbol}, outside the {stage} alphabet")]
    OutsideAlphabet { nurse: String, date: chrono::NaiveDate, symbol: String, stage: String },
    #[error("contradictory fixing at ({nurse}, {date}): {detail}")]
    ContradictoryFixing { nurse: String, date: chrono::NaiveDate, detail: String },
    #[error("solver binary not found (set ROSTRA_CBC or put `cbc` on PATH)")]
    SolverNotFound,
    #[error("solver output could not be parsed: {0}")]
    SolverOutput(String),
    #[error("objective mismatch: solver reported {solver}, evaluator computed {evaluated}")]
    ObjectiveMismatch { solver: f64, evaluated: f64 },
    #[error("time limit must be positive")]
    BadTimeLimit,
    #[error("session is in phase {phase}, operation needs {needed}")]
    WrongPhase { phase: String, needed: String },
    #[error("probe found unacknowledged hard conflicts ({0} records)")]
    ProbeFailed(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported format {0:?}")]
    UnsupportedFormat(String),
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    IoBare(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::IoBare(_))
    }
}
