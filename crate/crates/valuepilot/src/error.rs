use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// A single rule violation found while validating inputs.
///
/// Validation never stops at the first problem; callers receive every
/// violation found in one pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// Where the violation was found, e.g. `scenario "s1" / action "a2" / dimension "energy"`.
    pub location: String,
    /// What rule was broken.
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

/// An aggregate of every violation found in a validation pass.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, location: impl Into<String>, message: impl Into<String>) {
        self.violations.push(Violation {
            location: location.into(),
            message: message.into(),
        });
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn len(&self) -> usize {
        self.violations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    /// Turns a non-empty report into an error, or passes `value` through.
    pub fn into_result<T>(self, value: T) -> Result<T> {
        if self.is_clean() {
            Ok(value)
        } else {
            Err(Error::Invalid(self))
        }
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} violation(s):", self.violations.len())?;
        for v in &self.violations {
            writeln!(f, "  - {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A score or parameter is outside its documented domain.
    #[error("{location}: value {value} outside [{min}, {max}]")]
    OutOfRange {
        location: String,
        value: f64,
        min: f64,
        max: f64,
    },

    /// Vector lengths disagree with the governing dimension set.
    #[error("dimension count mismatch at {location}: expected {expected}, got {actual}")]
    DimensionMismatch {
        location: String,
        expected: usize,
        actual: usize,
    },

    /// One or more structural validation rules failed.
    #[error("{0}")]
    Invalid(ValidationReport),

    /// A metric was asked for on an empty input.
    #[error("metric `{0}` is undefined on empty input")]
    EmptyMetric(&'static str),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Remote assessor transport failure; `retries` is how many attempts were made
    /// after the first.
    #[error("remote assessor failed after {retries} retr{}: {message}", if *.retries == 1 { "y" } else { "ies" })]
    Remote { retries: u32, message: String },

    /// The brute-force oracle refuses large inputs.
    #[error("oracle guard: {n} actions exceeds the limit of {limit}")]
    OracleGuard { n: usize, limit: usize },

    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn out_of_range(location: impl Into<String>, value: f64, min: f64, max: f64) -> Self {
        Error::OutOfRange {
            location: location.into(),
            value,
            min,
            max,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
