use thiserror::Error;

use crate::lp::{LpError, LpStatus};

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("cannot parse configuration: {0}")]
    Parse(String),
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Error)]
pub enum SimError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error("infeasible input: {0}")]
    InfeasibleInput(String),
    #[error("window solve ended with status {status:?}")]
    NotOptimal { status: LpStatus },
    #[error("window {window}: {source}")]
    Window {
        window: usize,
        #[source]
        source: Box<SimError>,
    },
    #[error("simulation fault at step {step}: {reason}")]
    Plant { step: usize, reason: String },
    #[error("adaptive lambda became non-finite on day {day}")]
    LambdaNotFinite { day: usize },
    #[error("{0}")]
    Input(String),
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {path}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("gap in price series between {from} and {to}")]
    Gap { from: String, to: String },
    #[error("timestamps not increasing at line {line}")]
    NonMonotone { line: usize },
    #[error("{0}")]
    Other(String),
}

impl From<csv::Error> for IoError {
    fn from(e: csv::Error) -> Self {
        let line = e.position().map_or(0, |p| p.line() as usize);
        IoError::Malformed {
            line,
            reason: e.to_string(),
        }
    }
}

impl IoError {
    pub fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        IoError::File {
            path: path.display().to_string(),
            source,
        }
    }
}
