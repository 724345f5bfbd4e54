use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GurError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} entries do not form a square matrix")]
    NotSquare(usize),

    #[error("invalid composite space: {0}")]
    InvalidSpace(String),

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("cannot normalize a state with vanishing trace")]
    ZeroTrace,

    #[error("gemenge items live on different spaces")]
    MixedSpaces,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid refinement: {0}")]
    InvalidRefinement(String),

    #[error("kick operator is not unitary")]
    NotUnitary,

    #[error("unknown rule `{0}`")]
    UnknownRule(String),

    #[error("unknown check `{0}`")]
    UnknownCheck(String),

    #[error("unknown counterexample `{0}`")]
    UnknownCounterexample(String),

    #[error("witness cannot be replayed: {0}")]
    Replay(String),
}

pub type Result<T> = std::result::Result<T, GurError>;
