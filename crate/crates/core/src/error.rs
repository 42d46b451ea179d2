use std::path::PathBuf;

use crate::geom::Point3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("non-finite coordinate in {0}")]
    NonFinite(String),

    #[error("box has min {min:?} above max {max:?}")]
    InvertedBox { min: Point3, max: Point3 },

    #[error("negative sphere radius {0}")]
    NegativeRadius(f64),

    #[error("record id {id} appears more than once")]
    DuplicateId { id: u32 },

    #[error("record id {id} is outside the dense range 0..{count}")]
    IdOutOfRange { id: u32, count: usize },

    #[error("too many records for 32-bit ids: {0}")]
    TooManyRecords(usize),

    #[error("invalid `{field}`: {reason}")]
    InvalidConfig { field: &'static str, reason: String },

    #[error("selectivity calibration for class {class} did not converge in {rounds} rounds (last mean {last:.3e}, target {target:.3e})")]
    CalibrationDiverged { class: String, rounds: usize, last: f64, target: f64 },

    #[error("cannot split {elements} elements among {workers} workers")]
    TooManyWorkers { workers: usize, elements: usize },

    #[error("engine {engine} does not support {kind} records")]
    KindMismatch { engine: String, kind: String },

    #[error("engine {engine} returned a wrong result for {class} query #{query}: expected {expected} ids, got {got}")]
    OracleMismatch { engine: String, class: String, query: usize, expected: usize, got: usize },

    #[error("scaling requires data growth above 1, got {0}")]
    NoGrowth(f64),

    #[error("results are not comparable: {0}")]
    Incomparable(String),

    #[error("nothing to classify")]
    EmptyInput,

    #[error("worker {worker} failed: {source}")]
    Worker {
        worker: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("malformed {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
