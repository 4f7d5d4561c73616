use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: malformed row: {reason}")]
    MalformedRow { line: usize, reason: String },

    #[error("duplicate station id `{0}`")]
    DuplicateId(String),

    #[error("line {line}: coordinate out of range")]
    OutOfRangeCoordinate { line: usize },

    #[error("land sampling exhausted after {draws} draws")]
    ExhaustedSampling { draws: u64 },

    #[error("invalid land mask: {0}")]
    LandMask(String),

    #[error("non-finite input")]
    NonFiniteInput,

    #[error("allocation component {index} is not strictly positive")]
    ZeroComponent { index: usize },

    #[error("constellation spec is infeasible: counts sum to {sum}, expected {total}")]
    InfeasibleSpec { sum: u64, total: u64 },

    #[error("invalid design: {0}")]
    InvalidDesign(String),

    #[error("link is not visible")]
    NotVisible,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("kernel matrix is not positive definite after jitter escalation")]
    SingularKernel,

    #[error("parent pool of {pool} exceeds population of {population}")]
    PoolTooLarge { pool: usize, population: usize },

    #[error("gene length mismatch: {left} vs {right}")]
    GeneLengthMismatch { left: usize, right: usize },

    #[error("objective failed: {0}")]
    Objective(String),

    #[error("trace check failed: {0}")]
    TraceCheck(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
