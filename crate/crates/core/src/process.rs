//! The tripartite process matrix and its validity conditions.
//!
//! A candidate `W` on A₁A₂B₁B₂C₁C₂ is a valid process matrix when it is
//! positive semi-definite, has trace `d_{A₂} d_{B₂} d_{C₂} = 8`, and every
//! non-identity term of its Pauli expansion has at least one party acting
//! with identity on its output and non-identity on its input.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::party::Party;
use crate::tensor::{
    hermitian_eigenvalues, pauli_decompose, trace, word_to_matrix, ComplexMatrix, Pauli, PauliWord, FULL_DIM,
    HERMITIAN_TOL,
};

/// `d_{A₂} d_{B₂} d_{C₂}` for qubit outputs.
pub const EXPECTED_TRACE: f64 = 8.0;
pub const DEFAULT_TOL: f64 = 1e-9;

use Pauli::{I, X, Y, Z};

/// `𝟙 ⊗ σ_z ⊗ σ_z ⊗ 𝟙 ⊗ σ_z ⊗ σ_z`
pub const O1_WORD: PauliWord = PauliWord([I, Z, Z, I, Z, Z]);
/// `σ_z ⊗ 𝟙 ⊗ σ_x ⊗ σ_z ⊗ σ_y ⊗ σ_z`
pub const O2_WORD: PauliWord = PauliWord([Z, I, X, Z, Y, Z]);
/// `σ_z ⊗ σ_z ⊗ σ_y ⊗ σ_z ⊗ σ_x ⊗ 𝟙`
pub const O3_WORD: PauliWord = PauliWord([Z, Z, Y, Z, X, I]);

/// A Hermitian 64×64 operator on (A₁, A₂, B₁, B₂, C₁, C₂), each factor a qubit.
///
/// Construction checks shape and Hermiticity only; validity is [`validate`]'s job.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    matrix: ComplexMatrix,
}

impl ProcessMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.dim() != FULL_DIM {
            return Err(Error::DimensionMismatch {
                expected: FULL_DIM,
                found: matrix.dim(),
            });
        }
        let deviation = matrix.hermitian_deviation();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(ProcessMatrix { matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn factor_dims() -> [usize; 6] {
        [2; 6]
    }
}

/// The three commuting terms `o₁, o₂, o₃`.
pub fn build_o_terms() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    (
        word_to_matrix(&O1_WORD),
        word_to_matrix(&O2_WORD),
        word_to_matrix(&O3_WORD),
    )
}

/// `𝟙 + o₁ + o₂ + o₃`, whose spectrum decides positivity of `W`.
pub fn unnormalized_w() -> ComplexMatrix {
    let (o1, o2, o3) = build_o_terms();
    let id = ComplexMatrix::identity(FULL_DIM);
    &(&(&id + &o1) + &o2) + &o3
}

/// `W = (𝟙 + o₁ + o₂ + o₃) / 8`.
pub fn build_w() -> ProcessMatrix {
    ProcessMatrix::new(unnormalized_w().scale_real(0.125)).expect("W is Hermitian by construction")
}

/// Party that certifies a word: identity on its output, non-identity on its input.
pub fn certifying_party(word: &PauliWord) -> Option<Party> {
    Party::ALL.into_iter().find(|&p| {
        let (input, output) = word.party_labels(p);
        output == Pauli::I && input != Pauli::I
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub psd_ok: bool,
    pub min_eigenvalue: f64,
    pub trace_ok: bool,
    pub trace: f64,
    pub expected: f64,
    pub terms_ok: bool,
    pub offending_words: Vec<PauliWord>,
    pub overall: bool,
}

/// Checks the three validity conditions at absolute tolerance `tol`.
pub fn validate(w: &ProcessMatrix, tol: f64) -> Result<ValidityReport> {
    let m = w.matrix();
    let eigenvalues = hermitian_eigenvalues(m)?;
    let min_eigenvalue = eigenvalues.first().copied().unwrap_or(0.0);
    let psd_ok = min_eigenvalue >= -tol;

    let tr: Complex64 = trace(m);
    let trace_ok = (tr - Complex64::new(EXPECTED_TRACE, 0.0)).norm() <= tol;

    let coefficients = pauli_decompose(m)?;
    let offending_words: Vec<PauliWord> = coefficients
        .significant(tol)
        .map(|(word, _)| word)
        .filter(|word| !word.is_identity() && certifying_party(word).is_none())
        .collect();
    let terms_ok = offending_words.is_empty();

    Ok(ValidityReport {
        psd_ok,
        min_eigenvalue,
        trace_ok,
        trace: tr.re,
        expected: EXPECTED_TRACE,
        terms_ok,
        offending_words,
        overall: psd_ok && trace_ok && terms_ok,
    })
}
