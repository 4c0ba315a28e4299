use thiserror::Error;

use crate::arith::Place;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("invalid tuple ({a}, {b}, {c}, {d}): {reason}")]
    InvalidTuple {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        reason: String,
    },

    #[error("undecided at {place} for ({a}, {b}, {c}, {d}) after depth {depth}")]
    Undecided {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        place: Place,
        depth: u32,
    },

    #[error("no representative found for cell {cell} within {bound} candidates")]
    RepresentativeNotFound { cell: String, bound: u64 },

    #[error("representatives of cell {cell} disagree: {detail}")]
    Indeterminate { cell: String, detail: String },

    #[error("enumeration budget exceeded: {0}")]
    Budget(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
