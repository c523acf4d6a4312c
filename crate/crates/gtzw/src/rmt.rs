//! Finite-N random-matrix constructions: Haar and Hua-Pickrell sampling,
//! the canonical projection U(N) -> U(N-1), corner projections, the Cayley
//! transform, the multiplicative functions `f_{z,w|N}` and their cocycle.

use std::io::{Read, Write};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::numerics::linalg::{mgs_orthonormalize, solve, unitary_eigenvalues};
use crate::numerics::{log_gamma, log_sum_exp, CMatrix};
use crate::{Error, Result};

const UNITARITY_TOL: f64 = 1e-10;
/// Matrices with an eigenvalue this close to -1 are treated as lying on the
/// exceptional set where the projections and `f_{z,w}` degenerate.
pub const EXCEPTIONAL_TOL: f64 = 1e-12;

/// A unitary matrix; `U U* = I` within an operator residual of 1e-10.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitaryMatrix(CMatrix);

impl UnitaryMatrix {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain("unitary matrices must be square".into()));
        }
        let r = m.unitarity_residual();
        if r > UNITARITY_TOL {
            return Err(Error::Domain(format!(
                "unitarity residual {r:.3e} exceeds 1e-10"
            )));
        }
        Ok(UnitaryMatrix(m))
    }

    pub fn identity(n: usize) -> Self {
        UnitaryMatrix(CMatrix::identity(n))
    }

    pub fn dim(&self) -> usize {
        self.0.n_rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn adjoint(&self) -> UnitaryMatrix {
        UnitaryMatrix(self.0.adjoint())
    }

    pub fn mul(&self, other: &UnitaryMatrix) -> UnitaryMatrix {
        UnitaryMatrix(self.0.mul(&other.0))
    }

    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        unitary_eigenvalues(&self.0)
    }

    /// Distance of the spectrum from the exceptional point -1.
    pub fn min_dist_to_minus_one(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .iter()
            .map(|u| (u + 1.0).norm())
            .fold(f64::INFINITY, f64::min))
    }

    /// Block-diagonal embedding into U(n), fixing the remaining coordinates.
    pub fn embed_at(&self, n: usize) -> Result<UnitaryMatrix> {
        let m = self.dim();
        if n < m {
            return Err(Error::LevelMismatch {
                lo: m,
                hi: n,
                expected: 0,
            });
        }
        let mut out = CMatrix::identity(n);
        for i in 0..m {
            for j in 0..m {
                out[(i, j)] = self.0[(i, j)];
            }
        }
        Ok(UnitaryMatrix(out))
    }
}

/// A Hermitian matrix, stored exactly symmetrized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermitianMatrix(CMatrix);

impl HermitianMatrix {
    /// Symmetrizes the input: `X <- (X + X*)/2`.
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain("Hermitian matrices must be square".into()));
        }
        let sym = m.add(&m.adjoint()).scale(Complex64::new(0.5, 0.0));
        Ok(HermitianMatrix(sym))
    }

    pub fn dim(&self) -> usize {
        self.0.n_rows
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(crate::numerics::linalg::hermitian_eig(&self.0)?.0)
    }

    /// Removes the last row and column (the projection consistent with the
    /// canonical projection under the Cayley transform).
    pub fn delete_last(&self) -> Result<HermitianMatrix> {
        let n = self.dim();
        if n < 2 {
            return Err(Error::Domain("cannot shrink a matrix of size < 2".into()));
        }
        Ok(HermitianMatrix(self.0.block(0, 0, n - 1, n - 1)))
    }
}

fn standard_normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    // Box-Muller; 1-u keeps the log argument in (0, 1].
    let u1: f64 = rng.random();
    let u2: f64 = rng.random();
    let r = (-2.0 * (1.0 - u1).ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Haar-distributed unitary matrix: orthonormalization of a complex Gaussian
/// matrix. The positive-diagonal convention of the triangular factor makes
/// the decomposition unique, so the output is exactly Haar.
pub fn haar_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<UnitaryMatrix> {
    assert!(n >= 1);
    let mut g = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let (x, y) = standard_normal_pair(rng);
            g[(i, j)] = Complex64::new(x, y) * std::f64::consts::FRAC_1_SQRT_2;
        }
    }
    UnitaryMatrix::new(mgs_orthonormalize(&g)?)
}

/// The canonical projection U(N) -> U(N-1):
/// `U = [[A, B], [C, D]] -> A - B (1+D)^{-1} C`, with the exceptional rule
/// `U -> A` when `D = -1` (then `B = C = 0`).
pub fn canonical_projection(u: &UnitaryMatrix) -> Result<UnitaryMatrix> {
    let n = u.dim();
    if n < 2 {
        return Err(Error::Domain("canonical projection needs N >= 2".into()));
    }
    let m = u.matrix();
    let a = m.block(0, 0, n - 1, n - 1);
    let d = m[(n - 1, n - 1)];
    if (d + 1.0).norm() < EXCEPTIONAL_TOL {
        return UnitaryMatrix::new(a);
    }
    let scale = 1.0 / (d + 1.0);
    let mut out = a;
    for i in 0..n - 1 {
        let bi = m[(i, n - 1)];
        if bi.norm_sqr() == 0.0 {
            continue;
        }
        for j in 0..n - 1 {
            out[(i, j)] -= bi * scale * m[(n - 1, j)];
        }
    }
    UnitaryMatrix::new(out)
}

/// Iterated canonical projection U(N) -> U(M) together with the lower-right
/// `(N-M) x (N-M)` block of the original matrix.
pub fn corner_projection(u: &UnitaryMatrix, m: usize) -> Result<(UnitaryMatrix, CMatrix)> {
    let n = u.dim();
    if m < 1 || m >= n {
        return Err(Error::LevelMismatch {
            lo: m,
            hi: n,
            expected: 1,
        });
    }
    let d_block = u.matrix().block(m, m, n - m, n - m);
    let mut cur = u.clone();
    while cur.dim() > m {
        cur = canonical_projection(&cur)?;
    }
    Ok((cur, d_block))
}

/// One-shot corner projection via the block formula `A - B (1+D)^{-1} C`,
/// the second route to the same map.
pub fn corner_projection_oneshot(u: &UnitaryMatrix, m: usize) -> Result<UnitaryMatrix> {
    let n = u.dim();
    if m < 1 || m >= n {
        return Err(Error::LevelMismatch {
            lo: m,
            hi: n,
            expected: 1,
        });
    }
    let mat = u.matrix();
    let a = mat.block(0, 0, m, m);
    let b = mat.block(0, m, m, n - m);
    let c = mat.block(m, 0, n - m, m);
    let d = mat.block(m, m, n - m, n - m);
    let one_plus_d = CMatrix::identity(n - m).add(&d);
    let (solved, _) = solve(&one_plus_d, &c)?;
    UnitaryMatrix::new(a.sub(&b.mul(&solved)))
}

/// The characteristic function `phi_U(zeta) = A + zeta B (1 - zeta D)^{-1} C`
/// of the corner partition; `phi_U(-1)` reproduces the corner projection.
pub fn characteristic_function(u: &UnitaryMatrix, m: usize, zeta: Complex64) -> Result<CMatrix> {
    let n = u.dim();
    if m < 1 || m >= n {
        return Err(Error::LevelMismatch {
            lo: m,
            hi: n,
            expected: 1,
        });
    }
    let mat = u.matrix();
    let a = mat.block(0, 0, m, m);
    let b = mat.block(0, m, m, n - m);
    let c = mat.block(m, 0, n - m, m);
    let d = mat.block(m, m, n - m, n - m);
    let lhs = CMatrix::identity(n - m).sub(&d.scale(zeta));
    let (solved, _) = solve(&lhs, &c)?;
    Ok(a.add(&b.mul(&solved).scale(zeta)))
}

/// Cayley transform `X = i (1-U) (1+U)^{-1}` of a unitary matrix without
/// eigenvalue -1. The smallest elimination pivot serves as the condition
/// estimate in the near-singular error.
pub fn cayley(u: &UnitaryMatrix) -> Result<HermitianMatrix> {
    let n = u.dim();
    let m = u.matrix();
    let one_plus = CMatrix::identity(n).add(m);
    let one_minus = CMatrix::identity(n).sub(m);
    let (x0, _) = solve(&one_plus, &one_minus)?;
    HermitianMatrix::new(x0.scale(Complex64::new(0.0, 1.0)))
}

/// Inverse Cayley transform `U = (i-X)(i+X)^{-1}`, defined for every
/// Hermitian matrix.
pub fn cayley_inverse(x: &HermitianMatrix) -> Result<UnitaryMatrix> {
    let n = x.dim();
    let i_mat = CMatrix::identity(n).scale(Complex64::new(0.0, 1.0));
    let i_plus = i_mat.add(x.matrix());
    let i_minus = i_mat.sub(x.matrix());
    let (u, _) = solve(&i_plus, &i_minus)?;
    UnitaryMatrix::new(u)
}

/// `f_{z,w|N}(U) = prod_k (1+u_k)^z (1+conj(u_k))^w` over the spectrum,
/// with principal powers; exactly zero on the exceptional set.
pub fn f_zw(u: &UnitaryMatrix, z: Complex64, w: Complex64) -> Result<Complex64> {
    let eigs = u.eigenvalues()?;
    let mut acc = Complex64::new(1.0, 0.0);
    for e in eigs {
        let base = e + 1.0;
        if base.norm() < EXCEPTIONAL_TOL {
            return Ok(Complex64::new(0.0, 0.0));
        }
        acc *= (z * base.ln() + w * base.conj().ln()).exp();
    }
    Ok(acc)
}

/// An element `(U_1, U_2)` of `U(M) x U(M)` acting on larger unitary groups
/// by `U -> U_2^{-1} U U_1`.
#[derive(Debug, Clone)]
pub struct GroupPair {
    pub left: UnitaryMatrix,
    pub right: UnitaryMatrix,
}

impl GroupPair {
    pub fn new(left: UnitaryMatrix, right: UnitaryMatrix) -> Result<Self> {
        if left.dim() != right.dim() {
            return Err(Error::LevelMismatch {
                lo: left.dim(),
                hi: right.dim(),
                expected: 0,
            });
        }
        Ok(GroupPair { left, right })
    }

    /// Diagonal element (V, V), acting by conjugation.
    pub fn diagonal(v: UnitaryMatrix) -> Self {
        GroupPair {
            left: v.clone(),
            right: v,
        }
    }

    pub fn dim(&self) -> usize {
        self.left.dim()
    }

    /// Group law matching the right action: `x.(g h) = (x.g).h`.
    pub fn compose(&self, other: &GroupPair) -> Result<GroupPair> {
        let m = self.dim().max(other.dim());
        GroupPair::new(
            self.left.embed_at(m)?.mul(&other.left.embed_at(m)?),
            self.right.embed_at(m)?.mul(&other.right.embed_at(m)?),
        )
    }

    /// `U -> U_2^{-1} U U_1` with the pair embedded at the level of `u`.
    pub fn apply(&self, u: &UnitaryMatrix) -> Result<UnitaryMatrix> {
        let n = u.dim();
        let u1 = self.left.embed_at(n)?;
        let u2 = self.right.embed_at(n)?;
        Ok(u2.adjoint().mul(u).mul(&u1))
    }
}

/// The multiplicative cocycle: the ratio
/// `f_{z,w|N}(U_2^{-1} U U_1) / f_{z,w|N}(U)`, whose value is stable in N
/// once the pair acts at a fixed lower level.
pub fn cocycle(u: &UnitaryMatrix, g: &GroupPair, z: Complex64, w: Complex64) -> Result<Complex64> {
    if g.dim() >= u.dim() {
        return Err(Error::LevelMismatch {
            lo: g.dim(),
            hi: u.dim(),
            expected: 1,
        });
    }
    let moved = g.apply(u)?;
    for (name, m) in [("base point", u), ("moved point", &moved)] {
        let dist = m.min_dist_to_minus_one()?;
        if dist < EXCEPTIONAL_TOL {
            let _ = name;
            return Err(Error::ExceptionalSet(dist));
        }
    }
    let num = f_zw(&moved, z, w)?;
    let den = f_zw(u, z, w)?;
    Ok(num / den)
}

/// Hua-Pickrell log-weight against Haar: `log |det((1+U)^s)|^2`.
/// Returns negative infinity on the exceptional set.
pub fn hua_pickrell_log_weight(u: &UnitaryMatrix, s: Complex64) -> Result<f64> {
    let eigs = u.eigenvalues()?;
    let mut acc = 0.0f64;
    for e in eigs {
        let base = e + 1.0;
        if base.norm() < EXCEPTIONAL_TOL {
            return Ok(f64::NEG_INFINITY);
        }
        acc += 2.0 * (s * base.ln()).re;
    }
    Ok(acc)
}

/// Exact log-normalizer of the unitary-side Hua-Pickrell measure:
/// `sum_k log Gamma(k) Gamma(k+s+conj s) / (Gamma(k+s) Gamma(k+conj s))`.
pub fn hua_pickrell_log_normalizer(n: usize, s: Complex64) -> Result<f64> {
    if s.re <= -0.5 {
        return Err(Error::Domain(format!(
            "Re s = {} must exceed -1/2 (the measure is infinite otherwise)",
            s.re
        )));
    }
    let mut acc = 0.0f64;
    for k in 1..=n {
        let kf = k as f64;
        acc += log_gamma(Complex64::new(kf, 0.0))?.log_modulus;
        acc += log_gamma(Complex64::new(kf + 2.0 * s.re, 0.0))?.log_modulus;
        acc -= 2.0 * log_gamma(s + kf)?.log_modulus;
    }
    Ok(acc)
}

/// Unnormalized log-density plus exact log-normalizer.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LogDensity {
    pub log_weight: f64,
    pub log_normalizer: f64,
}

impl LogDensity {
    pub fn normalized(&self) -> f64 {
        self.log_weight - self.log_normalizer
    }
}

/// Hua-Pickrell log-density on U(N) with respect to Haar measure.
pub fn hua_pickrell_logdensity_unitary(u: &UnitaryMatrix, s: Complex64) -> Result<LogDensity> {
    Ok(LogDensity {
        log_weight: hua_pickrell_log_weight(u, s)?,
        log_normalizer: hua_pickrell_log_normalizer(u.dim(), s)?,
    })
}

/// log of the Lebesgue volume constant `int det(1+X^2)^{-N} dX` over the
/// N x N Hermitian matrices:
/// `pi^{N(N+1)/2} 2^{N-N^2} N! / prod_{j<=N} j!`.
pub fn cayley_volume_log_constant(n: usize) -> Result<f64> {
    let nf = n as f64;
    let mut acc = nf * (nf + 1.0) / 2.0 * std::f64::consts::PI.ln();
    acc += (nf - nf * nf) * 2.0f64.ln();
    acc += log_gamma(Complex64::new(nf + 1.0, 0.0))?.log_modulus;
    for j in 1..=n {
        acc -= log_gamma(Complex64::new(j as f64 + 1.0, 0.0))?.log_modulus;
    }
    Ok(acc)
}

/// Hua-Pickrell log-density on Hermitian matrices with respect to Lebesgue
/// measure: weight
/// `det((1-iX)^{-s}) det((1+iX)^{-conj s}) det(1+X X*)^{-N}`
/// and the exact normalizer carried over from the unitary side through the
/// Cayley transform.
pub fn hua_pickrell_logdensity_hermitian(x: &HermitianMatrix, s: Complex64) -> Result<LogDensity> {
    let n = x.dim();
    let eigs = x.eigenvalues()?;
    let mut lw = 0.0f64;
    for &t in &eigs {
        let base = Complex64::new(1.0, -t); // 1 - i t
        lw += 2.0 * (-s * base.ln()).re;
        lw -= n as f64 * (1.0 + t * t).ln();
    }
    let log_normalizer = hua_pickrell_log_normalizer(n, s)? + cayley_volume_log_constant(n)?
        - (n as f64) * 2.0 * s.re * 2.0f64.ln();
    Ok(LogDensity {
        log_weight: lw,
        log_normalizer,
    })
}

/// Sampling strategy for the Hua-Pickrell measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HuaPickrellMode {
    /// Haar proposals with self-normalized weights `|det((1+U)^s)|^2`.
    Importance,
    /// Independence Metropolis chain with Haar proposals (exact chain).
    IndependenceMetropolis { burn_in: usize },
}

/// Weighted (or exact-chain) draws from the level-N Hua-Pickrell measure.
#[derive(Debug, Clone)]
pub struct HuaPickrellSamples {
    pub samples: Vec<(UnitaryMatrix, f64)>,
    /// effective sample size of the weighted set
    pub ess: f64,
    /// acceptance rate of the Metropolis chain, when applicable
    pub acceptance: Option<f64>,
}

/// Draws `count` samples. Importance mode reports the usual
/// `(sum w)^2 / sum w^2` effective sample size; the Metropolis mode yields
/// unit weights.
pub fn sample_hua_pickrell<R: Rng + ?Sized>(
    n: usize,
    s: Complex64,
    count: usize,
    mode: HuaPickrellMode,
    rng: &mut R,
) -> Result<HuaPickrellSamples> {
    if s.re <= -0.5 {
        return Err(Error::Domain(format!("Re s = {} must exceed -1/2", s.re)));
    }
    if count == 0 {
        return Err(Error::Empty("sample count must be positive"));
    }
    match mode {
        HuaPickrellMode::Importance => {
            let mut mats = Vec::with_capacity(count);
            let mut logws = Vec::with_capacity(count);
            for _ in 0..count {
                let u = haar_unitary(n, rng)?;
                logws.push(hua_pickrell_log_weight(&u, s)?);
                mats.push(u);
            }
            let total = log_sum_exp(&logws)?;
            let weights: Vec<f64> = logws.iter().map(|lw| (lw - total).exp()).collect();
            let ess = 1.0 / weights.iter().map(|w| w * w).sum::<f64>();
            Ok(HuaPickrellSamples {
                samples: mats.into_iter().zip(weights).collect(),
                ess,
                acceptance: None,
            })
        }
        HuaPickrellMode::IndependenceMetropolis { burn_in } => {
            let mut current = haar_unitary(n, rng)?;
            let mut current_lw = hua_pickrell_log_weight(&current, s)?;
            let mut accepted = 0usize;
            let mut proposed = 0usize;
            let mut out = Vec::with_capacity(count);
            for step in 0..(burn_in + count) {
                let cand = haar_unitary(n, rng)?;
                let cand_lw = hua_pickrell_log_weight(&cand, s)?;
                proposed += 1;
                let accept =
                    cand_lw >= current_lw || rng.random::<f64>() < (cand_lw - current_lw).exp();
                if accept {
                    current = cand;
                    current_lw = cand_lw;
                    accepted += 1;
                }
                if step >= burn_in {
                    out.push((current.clone(), 1.0 / count as f64));
                }
            }
            Ok(HuaPickrellSamples {
                samples: out,
                ess: count as f64,
                acceptance: Some(accepted as f64 / proposed as f64),
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

/// Matrix as nested JSON arrays of `[re, im]` pairs, row-major.
pub fn matrix_to_json(m: &CMatrix) -> serde_json::Value {
    serde_json::Value::Array(
        (0..m.n_rows)
            .map(|i| {
                serde_json::Value::Array(
                    (0..m.n_cols)
                        .map(|j| serde_json::json!([m[(i, j)].re, m[(i, j)].im]))
                        .collect(),
                )
            })
            .collect(),
    )
}

pub fn matrix_from_json(v: &serde_json::Value) -> Result<CMatrix> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Domain("expected an array of rows".into()))?;
    let n_rows = rows.len();
    let n_cols = rows
        .first()
        .and_then(|r| r.as_array())
        .map(|r| r.len())
        .unwrap_or(0);
    let mut m = CMatrix::zeros(n_rows, n_cols);
    for (i, row) in rows.iter().enumerate() {
        let row = row
            .as_array()
            .ok_or_else(|| Error::Domain("expected a row array".into()))?;
        if row.len() != n_cols {
            return Err(Error::Domain("ragged rows".into()));
        }
        for (j, entry) in row.iter().enumerate() {
            let pair = entry
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Domain("expected [re, im] entries".into()))?;
            m[(i, j)] = Complex64::new(
                pair[0].as_f64().unwrap_or(f64::NAN),
                pair[1].as_f64().unwrap_or(f64::NAN),
            );
        }
    }
    Ok(m)
}

const MATRIX_MAGIC: &[u8; 4] = b"GTRM";

/// Binary layout: magic "GTRM", u32 LE dimension, then 2 N^2 f64 LE values
/// row-major, real then imaginary part interleaved.
pub fn write_matrix_binary<W: Write>(w: &mut W, m: &CMatrix) -> std::io::Result<()> {
    assert!(m.is_square(), "binary format stores square matrices");
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&(m.n_rows as u32).to_le_bytes())?;
    for v in &m.data {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_matrix_binary<R: Read>(r: &mut R) -> std::io::Result<CMatrix> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != MATRIX_MAGIC {
        return Err(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            "bad magic",
        ));
    }
    let mut nb = [0u8; 4];
    r.read_exact(&mut nb)?;
    let n = u32::from_le_bytes(nb) as usize;
    let mut m = CMatrix::zeros(n, n);
    let mut buf = [0u8; 8];
    for idx in 0..n * n {
        r.read_exact(&mut buf)?;
        let re = f64::from_le_bytes(buf);
        r.read_exact(&mut buf)?;
        let im = f64::from_le_bytes(buf);
        m.data[idx] = Complex64::new(re, im);
    }
    Ok(m)
}

#[cfg(test)]
mod tests;
