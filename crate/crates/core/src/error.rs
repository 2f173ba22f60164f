use thiserror::Error;

use crate::splitting::Embedding;

/// Errors raised by the weight-cone library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("degree list is empty")]
    EmptyDegrees,
    #[error("residue degree at orbit {orbit} is {degree}; degrees must be >= 1")]
    DegreeTooSmall { orbit: usize, degree: usize },
    #[error("embedding ({}, {}) is out of range for this splitting type", .0.orbit, .0.position)]
    EmbeddingOutOfRange(Embedding),
    #[error("flat index {index} is out of range for d = {d}")]
    IndexOutOfRange { index: usize, d: usize },
    #[error("vectors belong to different splitting types")]
    SplittingMismatch,
    #[error("vector has length {found}, expected d = {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("exponent at flat index {index} is negative")]
    NegativeExponent { index: usize },
    #[error("invalid box: lo = {lo} > hi = {hi}")]
    InvalidBox { lo: i64, hi: i64 },
    #[error("search space of {size} points exceeds the ceiling of {ceiling}")]
    GuardExceeded { size: String, ceiling: u64 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("reduction strategies disagree for weight {weight}: {endpoints} distinct endpoints")]
    NonConfluent { weight: String, endpoints: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
