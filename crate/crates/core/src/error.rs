use thiserror::Error;

use crate::party::Party;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("tensor product of an empty factor list")]
    EmptyTensor,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("entry array has {found} elements, expected {expected}")]
    InvalidEntries { expected: usize, found: usize },

    #[error("factor dimensions {dims:?} do not multiply to matrix dimension {dim}")]
    FactorDims { dims: Vec<usize>, dim: usize },

    #[error("traced position {position} out of range for {factors} factors")]
    PositionOutOfRange { position: usize, factors: usize },

    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("bit value {0} is not 0 or 1")]
    InvalidBit(u8),

    #[error("invalid k-expression {0:?}")]
    InvalidKExpr(String),

    #[error("party {party} has no rule for m={m}")]
    MissingRule { party: Party, m: u8 },

    #[error("party {party} has more than one rule for m={m}")]
    DuplicateRule { party: Party, m: u8 },

    #[error("instrument of party {party} at m={m}, free bit {free} is not CPTP")]
    NotCptp { party: Party, m: u8, free: u8 },

    #[error("instrument lists outcome {0} more than once")]
    DuplicateOutcome(u8),

    #[error("expected one program for each of A, B, C; got {0}")]
    ProgramParties(String),

    #[error("m={m} is not in the game's alphabet")]
    InvalidRound { m: u8 },

    #[error("process matrix failed validation: {0}")]
    InvalidProcess(String),

    #[error("message size of {0} bits is not supported (expected 1 or 2)")]
    MessageBits(u32),
}

pub type Result<T> = std::result::Result<T, Error>;
