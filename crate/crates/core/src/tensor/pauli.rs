use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::{tensor, ComplexMatrix};
use crate::error::{Error, Result};
use crate::party::Party;

/// Number of qubit factors in the tripartite space.
pub const NUM_FACTORS: usize = 6;
/// Dimension of the full space, `2^6`.
pub const FULL_DIM: usize = 1 << NUM_FACTORS;

/// Single-qubit Pauli label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    fn from_index(i: usize) -> Pauli {
        Self::ALL[i & 3]
    }

    /// Whether the operator swaps |0⟩ and |1⟩.
    fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Amplitude of `P|b⟩` on the (unique) basis state it maps to.
    fn phase(self, bit: usize) -> Complex64 {
        match (self, bit) {
            (Pauli::I, _) | (Pauli::X, _) | (Pauli::Z, 0) => Complex64::new(1.0, 0.0),
            (Pauli::Z, _) => Complex64::new(-1.0, 0.0),
            (Pauli::Y, 0) => Complex64::new(0.0, 1.0),
            (Pauli::Y, _) => Complex64::new(0.0, -1.0),
        }
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pauli::I => "I",
            Pauli::X => "X",
            Pauli::Y => "Y",
            Pauli::Z => "Z",
        };
        f.write_str(s)
    }
}

impl FromStr for Pauli {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "i" => Ok(Pauli::I),
            "X" | "x" => Ok(Pauli::X),
            "Y" | "y" => Ok(Pauli::Y),
            "Z" | "z" => Ok(Pauli::Z),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

/// The standard 2×2 matrix for a Pauli label.
pub fn pauli(label: Pauli) -> ComplexMatrix {
    let o = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let entries = match label {
        Pauli::I => vec![one, o, o, one],
        Pauli::X => vec![o, one, one, o],
        Pauli::Y => vec![o, -i, i, o],
        Pauli::Z => vec![one, o, o, -one],
    };
    ComplexMatrix::new(2, entries).expect("2x2 literal")
}

/// Six Pauli labels over (A₁, A₂, B₁, B₂, C₁, C₂).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PauliWord(pub [Pauli; NUM_FACTORS]);

impl PauliWord {
    pub const IDENTITY: PauliWord = PauliWord([Pauli::I; NUM_FACTORS]);

    pub fn new(labels: [Pauli; NUM_FACTORS]) -> Self {
        PauliWord(labels)
    }

    pub fn labels(&self) -> &[Pauli; NUM_FACTORS] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::IDENTITY
    }

    /// The (input, output) labels of one party.
    pub fn party_labels(&self, party: Party) -> (Pauli, Pauli) {
        (self.0[party.input_position()], self.0[party.output_position()])
    }

    /// All 4⁶ words, `I < X < Y < Z` with position 0 most significant.
    pub fn all() -> impl Iterator<Item = PauliWord> {
        (0..1usize << (2 * NUM_FACTORS)).map(|n| {
            let mut labels = [Pauli::I; NUM_FACTORS];
            for (p, l) in labels.iter_mut().enumerate() {
                *l = Pauli::from_index(n >> (2 * (NUM_FACTORS - 1 - p)));
            }
            PauliWord(labels)
        })
    }

    /// Bit mask of basis positions flipped by the word.
    fn flip_mask(&self) -> usize {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, l)| l.flips())
            .fold(0, |m, (p, _)| m | 1 << (NUM_FACTORS - 1 - p))
    }

    /// `P|j⟩ = phase · |j ⊕ flip⟩`; returns `(flip, phase)`.
    fn action(&self, column: usize) -> (usize, Complex64) {
        let phase = self.0.iter().enumerate().fold(Complex64::new(1.0, 0.0), |acc, (p, l)| {
            acc * l.phase((column >> (NUM_FACTORS - 1 - p)) & 1)
        });
        (column ^ self.flip_mask(), phase)
    }
}

impl fmt::Display for PauliWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for PauliWord {
    type Err = Error;

    /// Parses six letters, e.g. `"IZZIZZ"`.
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        if chars.len() != NUM_FACTORS {
            return Err(Error::UnknownLabel(s.to_string()));
        }
        let mut labels = [Pauli::I; NUM_FACTORS];
        for (l, ch) in labels.iter_mut().zip(chars) {
            *l = ch.to_string().parse()?;
        }
        Ok(PauliWord(labels))
    }
}

/// Tensor product of the six single-qubit operators of a word.
pub fn word_to_matrix(w: &PauliWord) -> ComplexMatrix {
    let factors: Vec<ComplexMatrix> = w.0.iter().map(|&l| pauli(l)).collect();
    tensor(&factors).expect("six factors")
}

/// Coefficients `c_w = Tr[P_w · m] / 64` for all 4096 words.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliCoefficients(BTreeMap<PauliWord, Complex64>);

impl PauliCoefficients {
    pub fn get(&self, w: &PauliWord) -> Complex64 {
        self.0.get(w).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliWord, &Complex64)> {
        self.0.iter()
    }

    /// Words whose coefficient magnitude exceeds `tol`.
    pub fn significant(&self, tol: f64) -> impl Iterator<Item = (PauliWord, Complex64)> + '_ {
        self.0
            .iter()
            .filter(move |(_, c)| c.norm() > tol)
            .map(|(w, c)| (*w, *c))
    }

    /// `Σ_w c_w P_w`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(FULL_DIM);
        for (w, &c) in &self.0 {
            if c == Complex64::default() {
                continue;
            }
            for col in 0..FULL_DIM {
                let (row, phase) = w.action(col);
                out.set(row, col, out.get(row, col) + c * phase);
            }
        }
        out
    }
}

pub fn pauli_decompose(m: &ComplexMatrix) -> Result<PauliCoefficients> {
    if m.dim() != FULL_DIM {
        return Err(Error::DimensionMismatch {
            expected: FULL_DIM,
            found: m.dim(),
        });
    }
    let norm = 1.0 / FULL_DIM as f64;
    let coeffs = PauliWord::all()
        .map(|w| {
            // Tr[P m] = Σ_j P[j⊕f][j] · m[j][j⊕f]
            let tr: Complex64 = (0..FULL_DIM)
                .map(|col| {
                    let (row, phase) = w.action(col);
                    phase * m.get(col, row)
                })
                .sum();
            (w, tr * norm)
        })
        .collect();
    Ok(PauliCoefficients(coeffs))
}
