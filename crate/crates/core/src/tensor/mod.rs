//! Dense complex linear algebra over qubit tensor products.

mod eigen;
mod matrix;
mod pauli;

pub use eigen::{hermitian_eigenvalues, HERMITIAN_TOL, OFF_DIAGONAL_TOL};
pub use matrix::{partial_trace, tensor, trace, ComplexMatrix, MatrixDump};
pub use pauli::{pauli, pauli_decompose, word_to_matrix, Pauli, PauliCoefficients, PauliWord, FULL_DIM, NUM_FACTORS};
