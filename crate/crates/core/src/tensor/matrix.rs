use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "MatrixDump", try_from = "MatrixDump")]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

/// On-disk form: `{"dim": n, "re": [...], "im": [...]}`, both arrays row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixDump {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if entries.len() != dim * dim {
            return Err(Error::InvalidEntries {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(ComplexMatrix { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        ComplexMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = v;
        }
        m
    }

    /// `|v⟩⟨v|` for a column vector `v`.
    pub fn outer(v: &[Complex64]) -> Self {
        let n = v.len();
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.entries[i * n + j] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        self.scale(Complex64::new(factor, 0.0))
    }

    pub fn dagger(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.entries[j * n + i] = self.entries[i * n + j].conj();
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        self.check_same_dim(rhs)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.entries[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.entries[i * n + j] += a * rhs.entries[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// Kronecker product `self ⊗ rhs`, `self` most significant.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (n, m) = (self.dim, rhs.dim);
        let d = n * m;
        let mut out = Self::zeros(d);
        for i in 0..n {
            for j in 0..n {
                let a = self.entries[i * n + j];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..m {
                    for l in 0..m {
                        out.entries[(i * m + k) * d + j * m + l] = a * rhs.entries[k * m + l];
                    }
                }
            }
        }
        out
    }

    /// `AB − BA`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(&self.matmul(rhs)? - &rhs.matmul(self)?)
    }

    /// `Tr[self · rhs]` without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Result<Complex64> {
        self.check_same_dim(rhs)?;
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                acc += self.entries[i * n + j] * rhs.entries[j * n + i];
            }
        }
        Ok(acc)
    }

    pub fn max_abs_diff(&self, rhs: &Self) -> Result<f64> {
        self.check_same_dim(rhs)?;
        Ok(self
            .entries
            .iter()
            .zip(&rhs.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|M[i][j] − conj(M[j][i])|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermitian_deviation() <= tol
    }

    pub fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.max_abs_diff(rhs).map(|d| d <= tol).unwrap_or(false)
    }

    fn check_same_dim(&self, rhs: &Self) -> Result<()> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rhs.dim,
            });
        }
        Ok(())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics on dimension mismatch.
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix addition");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matrix subtraction");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("dimension mismatch in matrix product")
    }
}

impl From<ComplexMatrix> for MatrixDump {
    fn from(m: ComplexMatrix) -> Self {
        MatrixDump {
            dim: m.dim,
            re: m.entries.iter().map(|z| z.re).collect(),
            im: m.entries.iter().map(|z| z.im).collect(),
        }
    }
}

impl TryFrom<MatrixDump> for ComplexMatrix {
    type Error = Error;

    fn try_from(d: MatrixDump) -> Result<Self> {
        if d.re.len() != d.im.len() {
            return Err(Error::InvalidEntries {
                expected: d.re.len(),
                found: d.im.len(),
            });
        }
        let entries =
            d.re.iter()
                .zip(&d.im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect();
        ComplexMatrix::new(d.dim, entries)
    }
}

/// Tensor product of an ordered factor list, leftmost factor most significant.
pub fn tensor(factors: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors.split_first().ok_or(Error::EmptyTensor)?;
    Ok(rest.iter().fold(first.clone(), |acc, f| acc.kron(f)))
}

pub fn trace(m: &ComplexMatrix) -> Complex64 {
    (0..m.dim()).map(|i| m.get(i, i)).sum()
}

/// Traces out the factors listed in `traced` (duplicates are ignored).
///
/// `factor_dims` gives the dimension of each tensor factor, leftmost most
/// significant; their product must equal `m.dim()`.
pub fn partial_trace(m: &ComplexMatrix, factor_dims: &[usize], traced: &[usize]) -> Result<ComplexMatrix> {
    let total: usize = factor_dims.iter().product();
    if factor_dims.is_empty() || factor_dims.contains(&0) || total != m.dim() {
        return Err(Error::FactorDims {
            dims: factor_dims.to_vec(),
            dim: m.dim(),
        });
    }
    let nf = factor_dims.len();
    let mut is_traced = vec![false; nf];
    for &p in traced {
        if p >= nf {
            return Err(Error::PositionOutOfRange {
                position: p,
                factors: nf,
            });
        }
        is_traced[p] = true;
    }

    // strides of each factor in the full index
    let mut strides = vec![1usize; nf];
    for f in (0..nf.saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * factor_dims[f + 1];
    }
    let kept_dims: Vec<usize> = (0..nf).filter(|&f| !is_traced[f]).map(|f| factor_dims[f]).collect();
    let kept_dim: usize = kept_dims.iter().product();

    // Split an index into (kept index, traced index).
    let split = |idx: usize| -> (usize, usize) {
        let (mut kept, mut tr) = (0usize, 0usize);
        for f in 0..nf {
            let digit = (idx / strides[f]) % factor_dims[f];
            if is_traced[f] {
                tr = tr * factor_dims[f] + digit;
            } else {
                kept = kept * factor_dims[f] + digit;
            }
        }
        (kept, tr)
    };
    let parts: Vec<(usize, usize)> = (0..m.dim()).map(split).collect();

    let mut out = ComplexMatrix::zeros(kept_dim);
    for (i, &(ki, ti)) in parts.iter().enumerate() {
        for (j, &(kj, tj)) in parts.iter().enumerate() {
            if ti == tj {
                let v = out.get(ki, kj) + m.get(i, j);
                out.set(ki, kj, v);
            }
        }
    }
    Ok(out)
}
