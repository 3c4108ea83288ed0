//! Small dense square matrices: LU factorization, inverses, spectral norms.
//!
//! Everything here is sized for the operator experiments (d ≤ 6), so the
//! implementations favor determinism and clarity over asymptotic speed.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinAlgError {
    #[error("matrix is singular or numerically singular: {0}")]
    Singular(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("invalid matrix data: {0}")]
    Invalid(String),
}

/// Row-major square matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, LinAlgError> {
        let n = rows.len();
        if n == 0 {
            return Err(LinAlgError::Invalid("empty matrix".into()));
        }
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(LinAlgError::Dimension(format!(
                    "expected {} columns, got {}",
                    n,
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(LinAlgError::Invalid("non-finite entry".into()));
        }
        Ok(Self { n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn diagonal(entries: &[f64]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (i, &v) in entries.iter().enumerate() {
            m.data[i * m.n + i] = v;
        }
        m
    }

    /// Block-diagonal assembly of square blocks.
    pub fn block_diagonal(blocks: &[Matrix]) -> Self {
        let n: usize = blocks.iter().map(|b| b.n).sum();
        let mut m = Self::zeros(n);
        let mut off = 0;
        for b in blocks {
            for i in 0..b.n {
                for j in 0..b.n {
                    m.data[(off + i) * n + (off + j)] = b.get(i, j);
                }
            }
            off += b.n;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for i in 0..self.n {
            let mut acc = 0.0;
            for j in 0..self.n {
                acc += self.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        y
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.get(k, j);
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.set(j, i, self.get(i, j));
            }
        }
        out
    }

    /// Product of Euclidean row norms; by Hadamard's inequality an upper
    /// bound on |det|, used as the scale for singularity thresholds.
    pub fn hadamard_bound(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| self.get(i, j).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .product()
    }

    pub fn lu(&self) -> Result<Lu, LinAlgError> {
        Lu::factor(self)
    }

    pub fn determinant(&self) -> Result<f64, LinAlgError> {
        Ok(self.lu()?.det())
    }

    pub fn inverse(&self) -> Result<Matrix, LinAlgError> {
        let lu = self.lu()?;
        let n = self.n;
        let mut inv = Matrix::zeros(n);
        let mut e = vec![0.0; n];
        for j in 0..n {
            e.iter_mut().for_each(|v| *v = 0.0);
            e[j] = 1.0;
            let col = lu.solve(&e);
            for i in 0..n {
                inv.set(i, j, col[i]);
            }
        }
        Ok(inv)
    }

    /// Spectral norm ‖A‖ (largest singular value) by power iteration on AᵀA.
    ///
    /// Deterministic: starts from the normalized all-ones vector, then from
    /// the dominant basis vector as a guard against an orthogonal start, and
    /// keeps the larger Rayleigh quotient. Tolerance 1e-12, 10000-iteration cap.
    pub fn spectral_norm(&self) -> f64 {
        let n = self.n;
        let b = self.transpose().matmul(self);
        let ones: Vec<f64> = vec![1.0 / (n as f64).sqrt(); n];
        let mut best = power_iteration(&b, &ones);
        // column with the largest norm; ‖A‖ ≥ ‖A e_j‖ always
        let mut jbest = 0;
        let mut cbest = -1.0;
        for j in 0..n {
            let c: f64 = (0..n).map(|i| self.get(i, j).powi(2)).sum();
            if c > cbest {
                cbest = c;
                jbest = j;
            }
        }
        let mut e = vec![0.0; n];
        e[jbest] = 1.0;
        best = best.max(power_iteration(&b, &e));
        best.max(0.0).sqrt()
    }

    /// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
    /// Returns (eigenvalues, V) with columns of V the eigenvectors.
    pub fn sym_eigen(&self) -> (Vec<f64>, Matrix) {
        let n = self.n;
        let mut a = self.clone();
        let mut v = Matrix::identity(n);
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a.get(i, j).powi(2);
                }
            }
            if off.sqrt() < 1e-15 * (1.0 + a.hadamard_bound()) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a.get(p, q);
                    if apq.abs() < 1e-300 {
                        continue;
                    }
                    let app = a.get(p, p);
                    let aqq = a.get(q, q);
                    let tau = (aqq - app) / (2.0 * apq);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a.get(k, p);
                        let akq = a.get(k, q);
                        a.set(k, p, c * akp - s * akq);
                        a.set(k, q, s * akp + c * akq);
                    }
                    for k in 0..n {
                        let apk = a.get(p, k);
                        let aqk = a.get(q, k);
                        a.set(p, k, c * apk - s * aqk);
                        a.set(q, k, s * apk + c * aqk);
                    }
                    for k in 0..n {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, c * vkp - s * vkq);
                        v.set(k, q, s * vkp + c * vkq);
                    }
                }
            }
        }
        let vals = (0..n).map(|i| a.get(i, i)).collect();
        (vals, v)
    }
}

fn power_iteration(b: &Matrix, start: &[f64]) -> f64 {
    let mut x = start.to_vec();
    let mut lambda = 0.0;
    for _ in 0..10_000 {
        let y = b.matvec(&x);
        let norm: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        x = y.iter().map(|v| v / norm).collect();
        let by = b.matvec(&x);
        let new_lambda: f64 = x.iter().zip(by.iter()).map(|(a, b)| a * b).sum();
        if (new_lambda - lambda).abs() <= 1e-12 * new_lambda.abs().max(1.0) {
            return new_lambda;
        }
        lambda = new_lambda;
    }
    lambda
}

/// LU factorization with partial pivoting.
pub struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
    sign: f64,
}

impl Lu {
    fn factor(m: &Matrix) -> Result<Self, LinAlgError> {
        let n = m.n;
        let mut lu = m.data.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut pivot = k;
            let mut max = lu[k * n + k].abs();
            for i in (k + 1)..n {
                let v = lu[i * n + k].abs();
                if v > max {
                    max = v;
                    pivot = i;
                }
            }
            if max == 0.0 {
                return Err(LinAlgError::Singular(format!("zero pivot at column {k}")));
            }
            if pivot != k {
                for j in 0..n {
                    lu.swap(k * n + j, pivot * n + j);
                }
                perm.swap(k, pivot);
                sign = -sign;
            }
            let pk = lu[k * n + k];
            for i in (k + 1)..n {
                let factor = lu[i * n + k] / pk;
                lu[i * n + k] = factor;
                for j in (k + 1)..n {
                    lu[i * n + j] -= factor * lu[k * n + j];
                }
            }
        }
        Ok(Self { n, lu, perm, sign })
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for i in 0..self.n {
            d *= self.lu[i * self.n + i];
        }
        d
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = rhs[self.perm[i]];
            for j in 0..i {
                acc -= self.lu[i * n + j] * y[j];
            }
            y[i] = acc;
        }
        for i in (0..n).rev() {
            let mut acc = y[i];
            for j in (i + 1)..n {
                acc -= self.lu[i * n + j] * y[j];
            }
            y[i] = acc / self.lu[i * n + i];
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_det_and_inverse() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 3.0]]).unwrap();
        assert!((m.determinant().unwrap() - 5.0).abs() < 1e-14);
        let inv = m.inverse().unwrap();
        let prod = m.matmul(&inv);
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((prod.get(i, j) - expect).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn spectral_norm_diag() {
        let m = Matrix::diagonal(&[2.0, -3.0]);
        assert!((m.spectral_norm() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn spectral_norm_survives_orthogonal_start() {
        // AᵀA has dominant eigenvector (1,-1)/√2, orthogonal to the all-ones start
        let m = Matrix::from_rows(&[vec![2.0, -1.0], vec![-1.0, 2.0]]).unwrap();
        assert!((m.spectral_norm() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn shear_spectral_norm_is_golden_ratio() {
        let m = Matrix::from_rows(&[vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
        let golden = (1.0 + 5.0_f64.sqrt()) / 2.0;
        assert!((m.spectral_norm() - golden).abs() < 1e-10);
    }

    #[test]
    fn jacobi_eigen_reconstructs() {
        let m = Matrix::from_rows(&[
            vec![4.0, 1.0, 0.5],
            vec![1.0, 3.0, -0.25],
            vec![0.5, -0.25, 2.0],
        ])
        .unwrap();
        let (vals, v) = m.sym_eigen();
        // A v_k = λ_k v_k
        for k in 0..3 {
            let col: Vec<f64> = (0..3).map(|i| v.get(i, k)).collect();
            let av = m.matvec(&col);
            for i in 0..3 {
                assert!((av[i] - vals[k] * col[i]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn singular_rejected() {
        let m = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
        assert!(m.determinant().is_err() || m.determinant().unwrap() == 0.0);
    }
}
