//! Small dense complex matrices: Hermitian eigendecomposition by cyclic
//! Jacobi rotations and Cholesky-based positive-definite solves. Sized for
//! antenna-count matrices; no attempt at cache blocking.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Complex64::ONE);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.set(r, c, f(r, c));
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows);
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(r, k);
                if a == Complex64::ZERO {
                    continue;
                }
                for c in 0..other.cols {
                    let v = out.get(r, c) + a * other.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len());
        let mut out = vec![Complex64::ZERO; self.rows];
        for r in 0..self.rows {
            let mut acc = Complex64::ZERO;
            for c in 0..self.cols {
                acc += self.get(r, c) * v[c];
            }
            out[r] = acc;
        }
        out
    }

    /// A^H A, Hermitian of size cols x cols.
    pub fn gram(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.cols);
        for i in 0..self.cols {
            for j in i..self.cols {
                let mut acc = Complex64::ZERO;
                for r in 0..self.rows {
                    acc += self.get(r, i).conj() * self.get(r, j);
                }
                out.set(i, j, acc);
                out.set(j, i, acc.conj());
            }
        }
        out
    }

    /// A A^H, Hermitian of size rows x rows.
    pub fn gram_right(&self) -> Self {
        let mut out = Self::zeros(self.rows, self.rows);
        for i in 0..self.rows {
            for j in i..self.rows {
                let mut acc = Complex64::ZERO;
                for c in 0..self.cols {
                    acc += self.get(i, c) * self.get(j, c).conj();
                }
                out.set(i, j, acc);
                out.set(j, i, acc.conj());
            }
        }
        out
    }

    /// In-place scaled accumulate: self += alpha * other.
    pub fn axpy(&mut self, alpha: f64, other: &Self) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (d, s) in self.data.iter_mut().zip(other.data.iter()) {
            *d += alpha * s;
        }
    }

    pub fn add_scaled_identity(&mut self, alpha: f64) {
        assert_eq!(self.rows, self.cols);
        for i in 0..self.rows {
            let v = self.get(i, i) + alpha;
            self.set(i, i, v);
        }
    }

    pub fn col(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi sweeps.
/// Returns eigenvalues in ascending order with matching eigenvector columns.
pub fn hermitian_eig(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    assert_eq!(a.rows, a.cols, "hermitian_eig needs a square matrix");
    let n = a.rows;
    let mut m = a.clone();
    let mut v = CMat::identity(n);
    if n == 1 {
        return Ok((vec![m.get(0, 0).re], v));
    }
    let scale = m.frobenius_norm().max(f64::MIN_POSITIVE);
    const MAX_SWEEPS: usize = 60;
    for _sweep in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            let mut pairs: Vec<(f64, usize)> =
                (0..n).map(|i| (m.get(i, i).re, i)).collect();
            pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
            let eigvals: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
            let vecs = CMat::from_fn(n, n, |r, c| v.get(r, pairs[c].1));
            return Ok((eigvals, vecs));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                let r = apq.norm();
                if r <= 1e-300 {
                    continue;
                }
                let phase = apq / r;
                let app = m.get(p, p).re;
                let aqq = m.get(q, q).re;
                // tan(2 theta) = 2r / (app - aqq), smaller-angle root.
                let t = if app == aqq {
                    1.0
                } else {
                    let zeta = (app - aqq) / (2.0 * r);
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                // Columns: col_p <- c col_p + s conj(phase) col_q,
                //          col_q <- -s phase col_p + c col_q.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp + s * phase.conj() * mkq);
                    m.set(k, q, -s * phase * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk + s * phase * mqk);
                    m.set(q, k, -s * phase.conj() * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp + s * phase.conj() * vkq);
                    v.set(k, q, -s * phase * vkp + c * vkq);
                }
            }
        }
    }
    Err(Error::DegenerateChannel)
}

/// Lower-triangular Cholesky factor of a Hermitian positive-definite matrix.
pub fn cholesky(k: &CMat) -> Result<CMat> {
    assert_eq!(k.rows, k.cols);
    let n = k.rows;
    let mut l = CMat::zeros(n, n);
    for j in 0..n {
        let mut d = k.get(j, j).re;
        for m in 0..j {
            d -= l.get(j, m).norm_sqr();
        }
        if !(d > 0.0) || !d.is_finite() {
            return Err(Error::SolveFailure);
        }
        let djj = d.sqrt();
        l.set(j, j, Complex64::new(djj, 0.0));
        for i in (j + 1)..n {
            let mut acc = k.get(i, j);
            for m in 0..j {
                acc -= l.get(i, m) * l.get(j, m).conj();
            }
            l.set(i, j, acc / djj);
        }
    }
    Ok(l)
}

/// Quadratic form w^H K^-1 w for Hermitian positive-definite K, via the
/// Cholesky factor: equals the squared norm of L^-1 w, hence always >= 0.
pub fn quad_form_inv(k: &CMat, w: &[Complex64]) -> Result<f64> {
    let l = cholesky(k)?;
    let n = w.len();
    let mut y = w.to_vec();
    for i in 0..n {
        let mut acc = y[i];
        for m in 0..i {
            acc -= l.get(i, m) * y[m];
        }
        y[i] = acc / l.get(i, i).re;
    }
    Ok(y.iter().map(|z| z.norm_sqr()).sum())
}
