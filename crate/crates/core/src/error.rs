use std::path::PathBuf;

use crate::geometry::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {message}")]
    Schema { path: String, message: String },

    #[error("unknown field `{path}`")]
    UnknownField { path: String },

    #[error("{path}: geometry outside the room bounds ({message})")]
    OutOfRoom { path: String, message: String },

    #[error("{path}: {message}")]
    Geometry { path: String, message: String },

    #[error("floor regions do not partition the floor: cell (row {row}, col {col}) is covered by {count} regions")]
    FloorPartition { row: usize, col: usize, count: usize },

    #[error("{field} = {value} is out of range: {expected}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("layout has no support objects")]
    NoSupportObjects,

    #[error("fixture {0} is not present in the layout")]
    MissingFixture(String),

    #[error("could not sample a free point in the sitting zone of {fixture} after {attempts} attempts")]
    Sampling { fixture: String, attempts: usize },

    #[error("planning infeasible: {0}")]
    Infeasible(String),

    #[error("oracle state space too large: {states} states exceeds {limit}")]
    StateSpaceTooLarge { states: usize, limit: usize },

    #[error("point ({}, {}) lies outside the evaluation grid", .0.x, .0.y)]
    OutsideGrid(Point),

    #[error("dimension mismatch: expected {expected_rows}x{expected_cols}, got {rows}x{cols}")]
    DimensionMismatch {
        expected_rows: usize,
        expected_cols: usize,
        rows: usize,
        cols: usize,
    },

    #[error("grid text line {line}: {message}")]
    GridParse { line: usize, message: String },

    #[error("cannot read {}", .path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }

    pub(crate) fn geometry(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Geometry {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by malformed or inconsistent input documents.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Schema { .. }
                | Error::UnknownField { .. }
                | Error::OutOfRoom { .. }
                | Error::Geometry { .. }
                | Error::FloorPartition { .. }
                | Error::OutOfRange { .. }
                | Error::MissingFixture(_)
                | Error::GridParse { .. }
                | Error::Io { .. }
        )
    }

    /// Field path named by the error, when there is one.
    pub fn field_path(&self) -> Option<&str> {
        match self {
            Error::Schema { path, .. }
            | Error::UnknownField { path }
            | Error::OutOfRoom { path, .. }
            | Error::Geometry { path, .. } => Some(path),
            Error::OutOfRange { field, .. } => Some(field),
            _ => None,
        }
    }
}
