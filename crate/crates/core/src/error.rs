use std::path::PathBuf;

use thiserror::Error;

/// Every failure the library can report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("bid {value} at position {index} is not positive")]
    NonPositiveBid { index: usize, value: f64 },

    #[error("bid at position {index} is not a finite number")]
    NonFiniteBid { index: usize },

    #[error("could not parse bid {token:?}")]
    BadBidToken { token: String },

    #[error("the other bidders' vector is empty")]
    EmptyOthers,

    #[error("at least two bidders are required, got {0}")]
    TooFewBidders(usize),

    #[error("value support is empty")]
    EmptySupport,

    #[error("value {0} must be positive and finite")]
    InvalidValue(f64),

    #[error("partition covers {partition} bids but the vector has {bids}")]
    LengthMismatch { partition: usize, bids: usize },

    #[error("alpha {0} is outside [0, 1]")]
    InvalidAlpha(f64),

    #[error("bidder index {index} out of range for {len} bids")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("duplicate transaction id {0}")]
    DuplicateTxId(String),

    #[error("malformed block: {0}")]
    MalformedBlock(String),

    #[error("exhaustive search over {n} bids exceeds the evaluation budget ({budget})")]
    BudgetExceeded { n: usize, budget: u64 },

    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("value pool is empty after filtering ({filtered} rows dropped)")]
    EmptyPool { filtered: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
