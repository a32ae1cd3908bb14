//! Hermitian eigenvalues by cyclic Jacobi rotation.
//!
//! A Hermitian `H = A + iB` is embedded as the real symmetric
//! `[[A, −B], [B, A]]`, whose spectrum is that of `H` with every eigenvalue
//! doubled. Jacobi sweeps drive the off-diagonal mass of the embedding to zero
//! and the diagonal is then read off.

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};

/// Input must be Hermitian within this bound.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Off-diagonal Frobenius norm at which sweeping stops (scaled by `max(1, ‖M‖_F)`).
pub const OFF_DIAGONAL_TOL: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

/// Real symmetric matrix in row-major storage.
struct SymmetricMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymmetricMatrix {
    fn embed(m: &ComplexMatrix) -> Self {
        let d = m.dim();
        let n = 2 * d;
        let mut a = vec![0.0; n * n];
        for i in 0..d {
            for j in 0..d {
                let z = m.get(i, j);
                a[i * n + j] = z.re;
                a[(i + d) * n + (j + d)] = z.re;
                a[i * n + (j + d)] = -z.im;
                a[(i + d) * n + j] = z.im;
            }
        }
        SymmetricMatrix { n, a }
    }

    fn off_diagonal_norm(&self) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += self.a[i * n + j] * self.a[i * n + j];
                }
            }
        }
        s.sqrt()
    }

    fn frobenius_norm(&self) -> f64 {
        self.a.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Annihilates `a[p][q]` with the rotation `Jᵀ A J`.
    fn rotate(&mut self, p: usize, q: usize) {
        let n = self.n;
        let apq = self.a[p * n + q];
        if apq == 0.0 {
            return;
        }
        let app = self.a[p * n + p];
        let aqq = self.a[q * n + q];
        let theta = (aqq - app) / (2.0 * apq);
        let t = if theta.abs() > 1e150 {
            0.5 / theta
        } else {
            theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
        };
        let c = 1.0 / (t * t + 1.0).sqrt();
        let s = t * c;

        for k in 0..n {
            let akp = self.a[k * n + p];
            let akq = self.a[k * n + q];
            self.a[k * n + p] = c * akp - s * akq;
            self.a[k * n + q] = s * akp + c * akq;
        }
        for k in 0..n {
            let apk = self.a[p * n + k];
            let aqk = self.a[q * n + k];
            self.a[p * n + k] = c * apk - s * aqk;
            self.a[q * n + k] = s * apk + c * aqk;
        }
        self.a[p * n + q] = 0.0;
        self.a[q * n + p] = 0.0;
    }

    fn diagonalize(&mut self) -> Result<Vec<f64>> {
        let n = self.n;
        let threshold = OFF_DIAGONAL_TOL * self.frobenius_norm().max(1.0);
        for _ in 0..MAX_SWEEPS {
            if self.off_diagonal_norm() < threshold {
                return Ok((0..n).map(|i| self.a[i * n + i]).collect());
            }
            for p in 0..n {
                for q in p + 1..n {
                    self.rotate(p, q);
                }
            }
        }
        if self.off_diagonal_norm() < threshold {
            return Ok((0..n).map(|i| self.a[i * n + i]).collect());
        }
        Err(Error::NoConvergence { sweeps: MAX_SWEEPS })
    }
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let mut doubled = SymmetricMatrix::embed(m).diagonalize()?;
    doubled.sort_by(f64::total_cmp);
    // each eigenvalue of H appears twice in the embedding
    Ok(doubled.into_iter().step_by(2).collect())
}
