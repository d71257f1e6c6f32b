use thiserror::Error;

/// Errors raised by the estimation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("probability {0} outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("point {x} lies outside the tail region of the class")]
    OutsideTailRegion { x: f64 },
    #[error("empty data")]
    EmptyData,
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("block size {block} exceeds sample length {len}")]
    BlockTooLarge { block: usize, len: usize },
    #[error("too few blocks: {got} (need at least {need})")]
    TooFewBlocks { got: usize, need: usize },
    #[error("rate grid value {0} is not one of 1/4, 1/2, 3/4")]
    InvalidRateGrid(String),
    #[error("invalid experiment config: {0}")]
    Config(String),
    #[error("all {0} replicates failed")]
    AllReplicatesFailed(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
