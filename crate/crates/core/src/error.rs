use thiserror::Error;

/// Errors produced while loading data or running an estimator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("row {line}, column {column}: cannot parse {cell:?} as a number")]
    NonNumeric {
        line: usize,
        column: usize,
        cell: String,
    },
    #[error("row {line}, column {column}: value is not finite")]
    NonFinite { line: usize, column: usize },
    #[error("row {line} has {found} fields, expected {expected}")]
    Ragged {
        line: usize,
        found: usize,
        expected: usize,
    },
    #[error("need at least 2 data rows, found {0}")]
    TooFewRows(usize),
    #[error("column selection is empty")]
    EmptySelection,
    #[error("column {0} does not exist")]
    UnknownColumn(String),
    #[error("column {0} selected more than once; duplicate columns yield coincident ranks")]
    DuplicateColumn(usize),
    #[error("matrix shape {rows}x{cols} does not match {len} values")]
    Shape {
        rows: usize,
        cols: usize,
        len: usize,
    },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("neighbor order k={k} needs more than {k} samples, got {samples}")]
    TooFewSamples { k: usize, samples: usize },
    #[error(
        "points {first} and {second} coincide, so the kth-neighbor distance is zero; \
         use the occurrence-order tie policy (--ties occurrence) or remove duplicate rows"
    )]
    CoincidentPoints { first: usize, second: usize },
    #[error("{estimator} needs {expected} variables, got {found}")]
    Dimension {
        estimator: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("digamma is undefined at {0}")]
    DigammaDomain(f64),
    #[error("correlation {0} must lie strictly inside (-1, 1)")]
    InvalidRho(f64),
    #[error("{0}")]
    Io(String),
}

impl Error {
    /// True for failures of the estimation step itself, as opposed to bad
    /// input data or arguments.
    pub fn is_estimation(&self) -> bool {
        matches!(
            self,
            Error::TooFewSamples { .. }
                | Error::CoincidentPoints { .. }
                | Error::Dimension { .. }
                | Error::DigammaDomain(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
