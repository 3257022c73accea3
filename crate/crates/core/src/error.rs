use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be positive")]
    ZeroModulus,

    #[error("modulus {m} exceeds the configured cap {cap} (set REPCLASS_MAX_M to raise it)")]
    ModulusTooLarge { m: usize, cap: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: usize, right: usize },

    #[error("{u} is not a unit modulo {m}")]
    NotAUnit { u: i64, m: usize },

    #[error("operation requires an even modulus, got {0}")]
    OddModulus(usize),

    #[error("modulus {m} needs a transform longer than the NTT cap {cap}")]
    TransformTooLarge { m: usize, cap: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("invalid construction parameters: {0}")]
    Construction(String),

    #[error("sets are not disjoint")]
    NotDisjoint,

    #[error("invalid search parameters: {0}")]
    InvalidSpec(String),

    #[error("enumeration of {count} candidates exceeds the cap {cap}")]
    CapExceeded { count: u128, cap: u128 },

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("checkpoint {path}: {source}")]
    CheckpointIo {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("checkpoint {path}, line {line}: {msg}")]
    CheckpointCorrupt { path: PathBuf, line: usize, msg: String },

    #[error("search interrupted after {completed} work units")]
    Interrupted { completed: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
