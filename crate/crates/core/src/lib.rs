//! Tripartite process matrices and signaling games without a predefined
//! causal order.
//!
//! * [`tensor`]: dense complex matrices, Pauli words, partial traces and a
//!   Jacobi eigensolver.
//! * [`process`]: the process matrix `W = (𝟙 + o₁ + o₂ + o₃)/8` and the
//!   validity checks (positivity, trace, allowed terms).
//! * [`instruments`]: measure-and-prepare operations in Choi–Jamiołkowski
//!   form and the strategy tables that win both games.
//! * [`game`]: joint outcome distributions and game scores.
//! * [`bounds`]: exact classical bounds under convex- and adaptive-definite
//!   causal order.

pub mod bounds;
pub mod error;
pub mod game;
pub mod instruments;
pub mod party;
pub mod process;
pub mod tensor;

pub use error::{Error, Result};
pub use party::{FreeBits, Party};
