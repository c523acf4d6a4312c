//! Dense complex matrices at desk scale (N <= 64).
//!
//! Partial-pivoted elimination for determinants and solves, modified
//! Gram-Schmidt for orthonormalization, and a Householder + implicit-QL
//! eigensolver for Hermitian matrices. Normal matrices (in practice:
//! unitary ones) are diagonalized through their commuting Hermitian parts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        CMatrix {
            n_rows,
            n_cols,
            data: vec![Complex64::new(0.0, 0.0); n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(
        n_rows: usize,
        n_cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex64,
    ) -> Self {
        let mut m = CMatrix::zeros(n_rows, n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn adjoint(&self) -> CMatrix {
        CMatrix::from_fn(self.n_cols, self.n_rows, |i, j| self[(j, i)].conj())
    }

    pub fn mul(&self, other: &CMatrix) -> CMatrix {
        assert_eq!(
            self.n_cols, other.n_rows,
            "dimension mismatch in matrix product"
        );
        let mut out = CMatrix::zeros(self.n_rows, other.n_cols);
        for i in 0..self.n_rows {
            for k in 0..self.n_cols {
                let a = self[(i, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for j in 0..other.n_cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn sub(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        CMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn add(&self, other: &CMatrix) -> CMatrix {
        assert_eq!((self.n_rows, self.n_cols), (other.n_rows, other.n_cols));
        CMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: Complex64) -> CMatrix {
        CMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            data: self.data.iter().map(|a| a * s).collect(),
        }
    }

    /// Copy of the block `rows x cols` starting at `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMatrix {
        assert!(r0 + rows <= self.n_rows && c0 + cols <= self.n_cols);
        CMatrix::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    /// Largest entry modulus.
    pub fn norm_max(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square());
        (0..self.n_rows).map(|i| self[(i, i)]).sum()
    }

    /// Max-entry residual of `self * self^* - I`.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.is_square());
        self.mul(&self.adjoint())
            .sub(&CMatrix::identity(self.n_rows))
            .norm_max()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n_cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n_cols + j]
    }
}

/// Determinant by partial-pivoted Gaussian elimination with row
/// equilibration. Exact for N = 1; singular matrices return a value near
/// zero rather than an error.
pub fn det_complex(m: &CMatrix) -> Complex64 {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.n_rows;
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if n == 1 {
        return m[(0, 0)];
    }
    let mut a = m.clone();
    // scale rows to unit max modulus so partial pivoting is not misled by
    // grading; the scales multiply back into the result
    let mut det = Complex64::new(1.0, 0.0);
    for i in 0..n {
        let rmax = (0..n).map(|j| a[(i, j)].norm()).fold(0.0f64, f64::max);
        if rmax > 0.0 && rmax.is_finite() {
            for j in 0..n {
                a[(i, j)] /= rmax;
            }
            det *= rmax;
        }
    }
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[(col, col)].norm();
        for r in (col + 1)..n {
            let v = a[(r, col)].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            for j in 0..n {
                a.data.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[(col, col)];
        det *= p;
        for r in (col + 1)..n {
            let factor = a[(r, col)] / p;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[(col, j)];
                a[(r, j)] -= factor * v;
            }
        }
    }
    det
}

/// Solves `A X = B` for square `A` by Gaussian elimination with partial
/// pivoting. Returns the smallest pivot modulus alongside the solution.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<(CMatrix, f64)> {
    assert!(a.is_square());
    assert_eq!(a.n_rows, b.n_rows);
    let n = a.n_rows;
    let k = b.n_cols;
    let mut m = a.clone();
    let mut x = b.clone();
    let scale = a.norm_max().max(1e-300);
    let mut min_pivot = f64::INFINITY;
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[(col, col)].norm();
        for r in (col + 1)..n {
            let v = m[(r, col)].norm();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        min_pivot = min_pivot.min(best);
        if best < scale * 1e-14 {
            return Err(Error::Singular(best));
        }
        if pivot != col {
            for j in 0..n {
                m.data.swap(col * n + j, pivot * n + j);
            }
            for j in 0..k {
                x.data.swap(col * k + j, pivot * k + j);
            }
        }
        let p = m[(col, col)];
        for r in (col + 1)..n {
            let factor = m[(r, col)] / p;
            if factor.norm_sqr() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = m[(col, j)];
                m[(r, j)] -= factor * v;
            }
            for j in 0..k {
                let v = x[(col, j)];
                x[(r, j)] -= factor * v;
            }
        }
    }
    for col in (0..n).rev() {
        let p = m[(col, col)];
        for j in 0..k {
            let mut acc = x[(col, j)];
            for r in (col + 1)..n {
                acc -= m[(col, r)] * x[(r, j)];
            }
            x[(col, j)] = acc / p;
        }
    }
    Ok((x, min_pivot))
}

pub fn inverse(a: &CMatrix) -> Result<(CMatrix, f64)> {
    solve(a, &CMatrix::identity(a.n_rows))
}

/// Modified Gram-Schmidt with one reorthogonalization pass. Columns of the
/// result are orthonormal; the implied triangular factor has positive real
/// diagonal, which makes the map from full-rank matrices unique.
pub fn mgs_orthonormalize(a: &CMatrix) -> Result<CMatrix> {
    assert!(a.is_square());
    let n = a.n_rows;
    let mut q = a.clone();
    for j in 0..n {
        for _pass in 0..2 {
            for i in 0..j {
                let mut r = Complex64::new(0.0, 0.0);
                for row in 0..n {
                    r += q[(row, i)].conj() * q[(row, j)];
                }
                for row in 0..n {
                    let v = q[(row, i)];
                    q[(row, j)] -= r * v;
                }
            }
        }
        let norm: f64 = (0..n).map(|row| q[(row, j)].norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-200 {
            return Err(Error::Singular(norm));
        }
        for row in 0..n {
            q[(row, j)] /= norm;
        }
    }
    Ok(q)
}

/// Eigenvalues (ascending) and eigenvector columns of a Hermitian matrix.
pub fn hermitian_eig(a: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    assert!(a.is_square());
    let n = a.n_rows;
    if n == 0 {
        return Ok((vec![], CMatrix::zeros(0, 0)));
    }
    if n == 1 {
        return Ok((vec![a[(0, 0)].re], CMatrix::identity(1)));
    }
    let mut t = a.clone();
    let mut q = CMatrix::identity(n);

    // Householder reduction to Hermitian tridiagonal form; dense similarity
    // updates are fine at this scale.
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for i in (k + 1)..n {
            norm2 += t[(i, k)].norm_sqr();
        }
        let norm = norm2.sqrt();
        if norm < 1e-300 {
            continue;
        }
        let x0 = t[(k + 1, k)];
        let alpha = if x0.norm_sqr() == 0.0 {
            Complex64::new(-norm, 0.0)
        } else {
            -(x0 / x0.norm()) * norm
        };
        let mut v = vec![Complex64::new(0.0, 0.0); n];
        v[k + 1] = x0 - alpha;
        for i in (k + 2)..n {
            v[i] = t[(i, k)];
        }
        let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
        if vnorm2 < 1e-300 {
            continue;
        }
        // T <- H T H and Q <- Q H with H = I - 2 v v^* / |v|^2
        let coef = 2.0 / vnorm2;
        // w = T v
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                acc += t[(i, j)] * v[j];
            }
            w[i] = acc;
        }
        // T <- T - coef * w v^* ; then T <- T - coef * v (v^* T)
        for i in 0..n {
            for j in (k + 1)..n {
                let delta = coef * w[i] * v[j].conj();
                t[(i, j)] -= delta;
            }
        }
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in (k + 1)..n {
                acc += v[i].conj() * t[(i, j)];
            }
            u[j] = acc;
        }
        for i in (k + 1)..n {
            for j in 0..n {
                let delta = coef * v[i] * u[j];
                t[(i, j)] -= delta;
            }
        }
        // Q <- Q H
        let mut qv = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in (k + 1)..n {
                acc += q[(i, j)] * v[j];
            }
            qv[i] = acc;
        }
        for i in 0..n {
            for j in (k + 1)..n {
                let delta = coef * qv[i] * v[j].conj();
                q[(i, j)] -= delta;
            }
        }
    }

    // Phase-rotate so the off-diagonal becomes real nonnegative.
    let mut diag = vec![0.0f64; n];
    let mut off = vec![0.0f64; n.saturating_sub(1)];
    let mut phase = vec![Complex64::new(1.0, 0.0); n];
    for k in 0..n - 1 {
        let e = t[(k + 1, k)];
        let m = e.norm();
        off[k] = m;
        phase[k + 1] = if m > 0.0 {
            phase[k] * (e / m)
        } else {
            phase[k]
        };
    }
    for (i, d) in diag.iter_mut().enumerate() {
        *d = t[(i, i)].re;
    }
    for j in 0..n {
        let ph = phase[j];
        for i in 0..n {
            q[(i, j)] *= ph;
        }
    }

    tridiagonal_ql(&mut diag, &mut off, &mut q)?;

    // Sort ascending, permuting eigenvector columns along.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());
    let vals: Vec<f64> = order.iter().map(|&i| diag[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| q[(i, order[j])]);
    Ok((vals, vecs))
}

/// Implicit QL with Wilkinson shifts on a real symmetric tridiagonal matrix,
/// accumulating the rotations into the (complex) column basis `q`.
fn tridiagonal_ql(d: &mut [f64], off: &mut [f64], q: &mut CMatrix) -> Result<()> {
    let n = d.len();
    if n <= 1 {
        return Ok(());
    }
    // e[i] couples d[i] and d[i+1]; e[n-1] is workspace.
    let mut e = vec![0.0f64; n];
    e[..n - 1].copy_from_slice(off);
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(Error::NoConvergence(iter));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..q.n_rows {
                    let f = q[(row, i + 1)];
                    let v = q[(row, i)];
                    q[(row, i + 1)] = s * v + c * f;
                    q[(row, i)] = c * v - s * f;
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    off.copy_from_slice(&e[..n - 1]);
    Ok(())
}

/// Eigenvalues of a normal matrix via its commuting Hermitian parts.
///
/// H = (M + M^*)/2 is diagonalized first; clusters of nearly equal
/// H-eigenvalues are then split by diagonalizing the compressed block of
/// K = (M - M^*)/2i, with a Rayleigh-quotient refinement of the real part.
pub fn normal_eigenvalues(m: &CMatrix) -> Result<Vec<Complex64>> {
    assert!(m.is_square());
    let n = m.n_rows;
    if n == 0 {
        return Ok(vec![]);
    }
    let adj = m.adjoint();
    let h = m.add(&adj).scale(Complex64::new(0.5, 0.0));
    let k = m.sub(&adj).scale(Complex64::new(0.0, -0.5));
    let (hvals, q) = hermitian_eig(&h)?;
    let scale = m.norm_max().max(1.0);
    let tol = 1e-8 * scale;

    let mut eigs = Vec::with_capacity(n);
    let mut start = 0usize;
    while start < n {
        let mut end = start + 1;
        while end < n && hvals[end] - hvals[end - 1] <= tol {
            end += 1;
        }
        let size = end - start;
        if size == 1 {
            // K compressed to this single vector.
            let col = q.block(0, start, n, 1);
            let kv = col.adjoint().mul(&k.mul(&col))[(0, 0)].re;
            eigs.push(Complex64::new(hvals[start], kv));
        } else {
            let qc = q.block(0, start, n, size);
            let kb = qc.adjoint().mul(&k.mul(&qc));
            // Symmetrize against roundoff before diagonalizing.
            let kb = kb.add(&kb.adjoint()).scale(Complex64::new(0.5, 0.0));
            let (kvals, w) = hermitian_eig(&kb)?;
            let hb = qc.adjoint().mul(&h.mul(&qc));
            for (j, &kv) in kvals.iter().enumerate() {
                let wj = w.block(0, j, size, 1);
                let hv = wj.adjoint().mul(&hb.mul(&wj))[(0, 0)].re;
                eigs.push(Complex64::new(hv, kv));
            }
        }
        start = end;
    }
    Ok(eigs)
}

/// Eigenvalues of a unitary matrix, renormalized onto the unit circle.
pub fn unitary_eigenvalues(u: &CMatrix) -> Result<Vec<Complex64>> {
    let eigs = normal_eigenvalues(u)?;
    Ok(eigs
        .into_iter()
        .map(|v| {
            let r = v.norm();
            if r > 0.0 {
                v / r
            } else {
                v
            }
        })
        .collect())
}
