use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading, validating or solving an instance.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("instance has no shots")]
    EmptyInstance,

    #[error("shot {index} ({id}) has {found} features, expected {expected}")]
    DimensionMismatch {
        index: usize,
        id: String,
        expected: usize,
        found: usize,
    },

    #[error("shot {index} ({id}) has a zero-length feature vector")]
    EmptyFeatures { index: usize, id: String },

    #[error("shot {index} ({id}) has a non-finite feature value")]
    NonFiniteFeature { index: usize, id: String },

    #[error("shot {index} ({id}) has non-positive duration {duration}")]
    NonPositiveDuration {
        index: usize,
        id: String,
        duration: f64,
    },

    #[error("budget must be positive and finite, got {0}")]
    InvalidBudget(f64),

    #[error("infeasible instance: budget {budget}s is smaller than the shortest shot ({shortest}s)")]
    Infeasible { budget: f64, shortest: f64 },

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("image error in {path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error("frame file not found: {0}")]
    MissingFrame(PathBuf),

    #[error("achieved total distance {achieved} is below the optimum {optimal}")]
    BelowOptimum { achieved: f64, optimal: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
