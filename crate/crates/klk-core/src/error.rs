use thiserror::Error;

/// Errors surfaced by the engine. The CLI maps these onto exit codes:
/// invalid input → 2, corrupt/incompatible cache → 3, capacity → 4.
#[derive(Error, Debug)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(u8, u8),

    #[error("rank {n} exceeds the configured capacity {cap}")]
    CapacityExceeded { n: u8, cap: u8 },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("generator index {index} out of range for rank {n}")]
    InvalidGenerator { index: u8, n: u8 },

    #[error("{0} is not an involution")]
    NotAnInvolution(String),

    #[error("not a module character: multiplicity {mult} at ({perm}, degree {degree})")]
    NotAModuleCharacter {
        perm: String,
        degree: i32,
        mult: i64,
    },

    #[error("corrupt cache: {0}")]
    CorruptCache(String),

    #[error("incompatible cache: {0}")]
    IncompatibleCache(String),

    #[error("consistency check failed: {0}")]
    ConsistencyFailure(String),

    #[error("no such RSK shape for this rank: {0}")]
    UnknownShape(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
