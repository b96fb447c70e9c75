//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by oracle construction, probing and the algorithm drivers.
#[derive(Debug, Error)]
pub enum Error {
    /// A point or direction with the wrong number of coordinates.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A parameter outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An operation that requires a nonempty point set.
    #[error("empty point set")]
    EmptySet,

    /// An operation restricted to finite, enumerable point sets.
    #[error("operation requires a finite point set")]
    RequiresFiniteSet,

    /// The requested centers are not a subset of the input points.
    #[error("center {index} is not a member of the point set")]
    CentersNotSubset { index: usize },

    /// Spread is undefined when two input points coincide.
    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),

    /// Cone-cover construction failed its self check or exceeds limits.
    #[error("cone cover construction: {0}")]
    ConeCover(String),

    /// No balanced clustering exists even with every point as a center
    /// (only possible when the input contains more than k copies of a point).
    #[error("no balanced clustering: some point occurs more than k times")]
    Unclusterable,

    /// File I/O failure.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed points file or oracle config.
    #[error("parse: {0}")]
    Parse(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
