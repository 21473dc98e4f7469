//! Small dense complex-matrix helpers: Kronecker products, full-register
//! operator embedding, and a Jacobi eigensolver for Hermitian matrices.
//!
//! Everything here works on flat row-major `Vec<Complex64>` buffers. The
//! dimensions involved are tiny (2x2 and 4x4 gates, full operators only up
//! to a handful of qubits for identity checks), so clarity wins over BLAS.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const I: Complex64 = Complex64::new(0.0, 1.0);

/// Row-major square matrix with its dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub dim: usize,
    pub data: Vec<Complex64>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Mat {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for k in 0..dim {
            m.data[k * dim + k] = ONE;
        }
        m
    }

    pub fn from_rows(rows: &[&[Complex64]]) -> Self {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            assert_eq!(r.len(), dim, "matrix must be square");
            data.extend_from_slice(r);
        }
        Mat { dim, data }
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.dim + c] = v;
    }

    pub fn mul(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.at(r, k);
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.data[r * n + c] += a * other.at(k, c);
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Mat {
        let n = self.dim;
        let mut out = Mat::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(r, c, self.at(c, r).conj());
            }
        }
        out
    }

    pub fn scale(&self, s: Complex64) -> Mat {
        Mat {
            dim: self.dim,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim);
        Mat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Mat) -> Mat {
        assert_eq!(self.dim, other.dim);
        Mat {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Kronecker product; `self` supplies the high-order index bits.
    pub fn kron(&self, low: &Mat) -> Mat {
        let n = self.dim * low.dim;
        let mut out = Mat::zeros(n);
        for rh in 0..self.dim {
            for ch in 0..self.dim {
                let f = self.at(rh, ch);
                if f == ZERO {
                    continue;
                }
                for rl in 0..low.dim {
                    for cl in 0..low.dim {
                        out.set(rh * low.dim + rl, ch * low.dim + cl, f * low.at(rl, cl));
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Mat) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.dagger()) <= tol
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.dagger())
            .max_abs_diff(&Mat::identity(self.dim))
            <= tol
    }
}

/// Embed a single-qubit operator acting on qubit `k` into the full
/// `2^n`-dimensional register. Qubit 0 is the least significant index bit.
pub fn embed_single(op: &[[Complex64; 2]; 2], k: usize, n: usize) -> Result<Mat> {
    if k >= n {
        return Err(Error::QubitIndexOutOfRange { index: k, n });
    }
    let mut m = Mat::from_rows(&[&op[0], &op[1]]);
    let mut full = Mat::identity(1);
    // Build I (x) ... (x) op (x) ... (x) I with qubit q contributing bit q.
    for q in 0..n {
        let factor = if q == k {
            std::mem::replace(&mut m, Mat::identity(2))
        } else {
            Mat::identity(2)
        };
        full = factor.kron(&full);
    }
    Ok(full)
}

/// Embed a two-qubit operator into the full register. The 4x4 matrix is
/// indexed by `b_i + 2*b_j`, i.e. qubit `i` is the low bit of the gate index.
pub fn embed_pair(op: &[[Complex64; 4]; 4], i: usize, j: usize, n: usize) -> Result<Mat> {
    if i == j {
        return Err(Error::DuplicateQubit(i));
    }
    for &q in &[i, j] {
        if q >= n {
            return Err(Error::QubitIndexOutOfRange { index: q, n });
        }
    }
    let dim = 1usize << n;
    let mut full = Mat::zeros(dim);
    for col in 0..dim {
        let bi = (col >> i) & 1;
        let bj = (col >> j) & 1;
        let gc = bi | (bj << 1);
        let base = col & !(1 << i) & !(1 << j);
        for gr in 0..4 {
            let v = op[gr][gc];
            if v == ZERO {
                continue;
            }
            let row = base | ((gr & 1) << i) | (((gr >> 1) & 1) << j);
            full.data[row * dim + col] += v;
        }
    }
    Ok(full)
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in ascending order together with the matching
/// orthonormal eigenvectors (each inner `Vec` is one eigenvector), so that
/// `A = V diag(w) V^dagger`.
pub fn hermitian_eigen(a: &Mat) -> (Vec<f64>, Vec<Vec<Complex64>>) {
    let n = a.dim;
    let mut m = a.clone();
    let mut v = Mat::identity(n);

    let scale: f64 = m.data.iter().map(|x| x.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m.at(p, q).norm());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.at(p, q);
                let mag = apq.norm();
                if mag <= tol {
                    continue;
                }
                let phase = apq / mag; // e^{i arg}
                let app = m.at(p, p).re;
                let aqq = m.at(q, q).re;
                let tau = (aqq - app) / (2.0 * mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;

                // Columns: col_p' = c*col_p - s*conj(phase)*col_q,
                //          col_q' = s*phase*col_p + c*col_q, then the
                // conjugate action on rows keeps M Hermitian.
                for r in 0..n {
                    let mp = m.at(r, p);
                    let mq = m.at(r, q);
                    m.set(r, p, c * mp - s * phase.conj() * mq);
                    m.set(r, q, s * phase * mp + c * mq);
                }
                for col in 0..n {
                    let mp = m.at(p, col);
                    let mq = m.at(q, col);
                    m.set(p, col, c * mp - s * phase * mq);
                    m.set(q, col, s * phase.conj() * mp + c * mq);
                }
                for r in 0..n {
                    let vp = v.at(r, p);
                    let vq = v.at(r, q);
                    v.set(r, p, c * vp - s * phase.conj() * vq);
                    v.set(r, q, s * phase * vp + c * vq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let vals: Vec<f64> = (0..n).map(|k| m.at(k, k).re).collect();
    order.sort_by(|&x, &y| vals[x].total_cmp(&vals[y]));

    let eigenvalues: Vec<f64> = order.iter().map(|&k| vals[k]).collect();
    let eigenvectors: Vec<Vec<Complex64>> = order
        .iter()
        .map(|&k| (0..n).map(|r| v.at(r, k)).collect())
        .collect();
    (eigenvalues, eigenvectors)
}
