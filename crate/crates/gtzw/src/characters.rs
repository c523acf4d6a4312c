//! The boundary Ω of Voiculescu parameters, extreme-character evaluation and
//! character-level operations: determinant twist, beta normalization, and
//! restriction of zw-characters to finite unitary groups.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::signatures::{log_weyl_dim, weyl_dim, Signature};
use crate::zw_measure::{build_table, ZwParams};
use crate::{Error, Result};

const OMEGA_SLACK: f64 = 1e-12;

/// Voiculescu parameters of an extreme character: two decreasing nonnegative
/// families per sign plus the totals `delta`. Only nonzero alpha/beta
/// entries are stored; `gamma = delta - sum(alpha) - sum(beta)` is derived.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct OmegaPoint {
    pub alpha_plus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    pub alpha_minus: Vec<f64>,
    pub beta_minus: Vec<f64>,
    pub delta_plus: f64,
    pub delta_minus: f64,
}

fn trim_zeros(v: &mut Vec<f64>) {
    while v.last() == Some(&0.0) {
        v.pop();
    }
}

impl OmegaPoint {
    pub fn new(
        mut alpha_plus: Vec<f64>,
        mut beta_plus: Vec<f64>,
        mut alpha_minus: Vec<f64>,
        mut beta_minus: Vec<f64>,
        delta_plus: f64,
        delta_minus: f64,
    ) -> Result<Self> {
        trim_zeros(&mut alpha_plus);
        trim_zeros(&mut beta_plus);
        trim_zeros(&mut alpha_minus);
        trim_zeros(&mut beta_minus);
        let p = OmegaPoint {
            alpha_plus,
            beta_plus,
            alpha_minus,
            beta_minus,
            delta_plus,
            delta_minus,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn zero() -> Self {
        OmegaPoint::default()
    }

    pub fn gamma_plus(&self) -> f64 {
        self.delta_plus - self.alpha_plus.iter().sum::<f64>() - self.beta_plus.iter().sum::<f64>()
    }

    pub fn gamma_minus(&self) -> f64 {
        self.delta_minus
            - self.alpha_minus.iter().sum::<f64>()
            - self.beta_minus.iter().sum::<f64>()
    }

    /// Checks the boundary constraints: ordered nonnegative families,
    /// nonnegative gammas, and the beta cap `beta_1^+ + beta_1^- <= 1`.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_plus", &self.alpha_plus),
            ("beta_plus", &self.beta_plus),
            ("alpha_minus", &self.alpha_minus),
            ("beta_minus", &self.beta_minus),
        ] {
            if v.iter().any(|&x| !x.is_finite() || x < 0.0) {
                return Err(Error::InvalidOmega(format!("{name} has a negative entry")));
            }
            if v.windows(2).any(|w| w[0] < w[1]) {
                return Err(Error::InvalidOmega(format!(
                    "{name} is not weakly decreasing"
                )));
            }
        }
        if self.gamma_plus() < -OMEGA_SLACK || self.gamma_minus() < -OMEGA_SLACK {
            return Err(Error::InvalidOmega(format!(
                "delta smaller than the parameter sum: gamma+ = {}, gamma- = {}",
                self.gamma_plus(),
                self.gamma_minus()
            )));
        }
        let b1p = self.beta_plus.first().copied().unwrap_or(0.0);
        let b1m = self.beta_minus.first().copied().unwrap_or(0.0);
        if b1p + b1m > 1.0 + OMEGA_SLACK {
            return Err(Error::InvalidOmega(format!(
                "beta_1^+ + beta_1^- = {} > 1",
                b1p + b1m
            )));
        }
        Ok(())
    }

    /// Transposes the plus and minus data (pointwise complex conjugation of
    /// the character).
    pub fn conjugate(&self) -> OmegaPoint {
        OmegaPoint {
            alpha_plus: self.alpha_minus.clone(),
            beta_plus: self.beta_minus.clone(),
            alpha_minus: self.alpha_plus.clone(),
            beta_minus: self.beta_plus.clone(),
            delta_plus: self.delta_minus,
            delta_minus: self.delta_plus,
        }
    }
}

/// Eigenvalues of a conjugacy class: unit-modulus entries different from 1
/// (an implicit tail of 1s is understood).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumList(Vec<Complex64>);

impl SpectrumList {
    pub fn new(eigenvalues: Vec<Complex64>) -> Result<Self> {
        for u in &eigenvalues {
            if (u.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::Domain(format!(
                    "eigenvalue {u} is off the unit circle"
                )));
            }
        }
        Ok(SpectrumList(eigenvalues))
    }

    pub fn empty() -> Self {
        SpectrumList(vec![])
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Disjoint union of two eigenvalue collections.
    pub fn union(&self, other: &SpectrumList) -> SpectrumList {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        SpectrumList(v)
    }
}

/// The single-eigenvalue factor of an extreme character:
/// `F(u) = e^{g+ (u-1) + g- (1/u - 1)}
///         prod_i (1 + b_i^+ (u-1))/(1 - a_i^+ (u-1))
///                (1 + b_i^- (1/u-1))/(1 - a_i^- (1/u-1))`.
///
/// `F(1) = 1` exactly; the denominators cannot vanish on the unit circle.
pub fn f_omega(omega: &OmegaPoint, u: Complex64) -> Complex64 {
    let up = u - 1.0;
    let um = 1.0 / u - 1.0;
    let mut acc = (omega.gamma_plus() * up + omega.gamma_minus() * um).exp();
    for &b in &omega.beta_plus {
        acc *= 1.0 + b * up;
    }
    for &a in &omega.alpha_plus {
        acc /= 1.0 - a * up;
    }
    for &b in &omega.beta_minus {
        acc *= 1.0 + b * um;
    }
    for &a in &omega.alpha_minus {
        acc /= 1.0 - a * um;
    }
    acc
}

/// Extreme character value on a conjugacy class: the product of [`f_omega`]
/// over the listed eigenvalues (the implicit 1s contribute factors of 1).
pub fn chi_omega(omega: &OmegaPoint, spectrum: &SpectrumList) -> Complex64 {
    spectrum
        .eigenvalues()
        .iter()
        .map(|&u| f_omega(omega, u))
        .product()
}

/// Fourier coefficients of `F^{(omega)}` on the circle by an `n_nodes`-point
/// trapezoid rule, for indices `l` in `[-l_max, l_max]`.
///
/// `F` is the characteristic function of a probability measure on the
/// integers, so the coefficients should come out real, nonnegative and
/// summing to one.
pub fn f_omega_fourier_coeffs(
    omega: &OmegaPoint,
    n_nodes: usize,
    l_max: i64,
) -> Vec<(i64, Complex64)> {
    let values: Vec<Complex64> = (0..n_nodes)
        .map(|j| {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / n_nodes as f64;
            f_omega(omega, Complex64::from_polar(1.0, theta))
        })
        .collect();
    (-l_max..=l_max)
        .map(|l| {
            let mut acc = Complex64::new(0.0, 0.0);
            for (j, &v) in values.iter().enumerate() {
                let theta = 2.0 * std::f64::consts::PI * j as f64 / n_nodes as f64;
                acc += v * Complex64::from_polar(1.0, -(l as f64) * theta);
            }
            (l, acc / n_nodes as f64)
        })
        .collect()
}

fn twist_once_up(omega: &OmegaPoint) -> OmegaPoint {
    // beta+ <- (1 - b1-, beta+...), beta- <- tail(beta-), gammas preserved
    let b1m = omega.beta_minus.first().copied().unwrap_or(0.0);
    let mut beta_plus = Vec::with_capacity(omega.beta_plus.len() + 1);
    beta_plus.push(1.0 - b1m);
    beta_plus.extend_from_slice(&omega.beta_plus);
    let beta_minus = omega.beta_minus.iter().skip(1).copied().collect();
    OmegaPoint {
        alpha_plus: omega.alpha_plus.clone(),
        beta_plus,
        alpha_minus: omega.alpha_minus.clone(),
        beta_minus,
        delta_plus: omega.delta_plus + (1.0 - b1m),
        delta_minus: omega.delta_minus - b1m,
    }
}

fn twist_once_down(omega: &OmegaPoint) -> OmegaPoint {
    twist_once_up(&omega.conjugate()).conjugate()
}

/// Tensors the character with `det^k`: `F` becomes `F(u) u^k` pointwise.
///
/// The beta shift rule is applied `|k|` times (mirrored for `k < 0`); the
/// deltas are updated so the gammas stay fixed. If the parameter cap breaks
/// after the shifts, the betas are renormalized.
pub fn det_twist(omega: &OmegaPoint, k: i64) -> Result<OmegaPoint> {
    let mut cur = omega.clone();
    for _ in 0..k.abs() {
        cur = if k > 0 {
            twist_once_up(&cur)
        } else {
            twist_once_down(&cur)
        };
    }
    trim_zeros(&mut cur.beta_plus);
    trim_zeros(&mut cur.beta_minus);
    if cur.validate().is_err() {
        cur = normalize_betas(cur)?;
    }
    cur.validate()?;
    Ok(cur)
}

/// Restores the cap `beta_1^+ + beta_1^- <= 1` without changing `F`, by the
/// head-pair exchange
/// `[1 + b+ (u-1)][1 + b- (1/u-1)] = [1 + (1-b-)(u-1)][1 + (1-b+)(1/u-1)]`;
/// the deltas absorb the difference so the gammas stay fixed.
pub fn normalize_betas(raw: OmegaPoint) -> Result<OmegaPoint> {
    let mut p = raw;
    let max_iters = p.beta_plus.len() + p.beta_minus.len() + 2;
    for _ in 0..max_iters {
        let b1p = p.beta_plus.first().copied().unwrap_or(0.0);
        let b1m = p.beta_minus.first().copied().unwrap_or(0.0);
        if b1p + b1m <= 1.0 {
            trim_zeros(&mut p.beta_plus);
            trim_zeros(&mut p.beta_minus);
            p.validate()?;
            return Ok(p);
        }
        if p.beta_plus.is_empty() {
            p.beta_plus.push(0.0);
        }
        if p.beta_minus.is_empty() {
            p.beta_minus.push(0.0);
        }
        p.beta_plus[0] = 1.0 - b1m;
        p.beta_minus[0] = 1.0 - b1p;
        p.beta_plus
            .sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
        p.beta_minus
            .sort_unstable_by(|a, b| b.partial_cmp(a).unwrap());
        p.delta_plus += (1.0 - b1m) - b1p;
        p.delta_minus += (1.0 - b1p) - b1m;
    }
    Err(Error::InvalidOmega(
        "beta normalization did not converge".into(),
    ))
}

/// Normalized irreducible character of U(N) at a full list of `N` unit
/// eigenvalues, evaluated as a ratio of generalized Vandermonde
/// determinants.
///
/// Coincident eigenvalues are handled by a small multiplicative phase
/// perturbation with Richardson extrapolation toward zero perturbation.
pub fn normalized_character(la: &Signature, points: &[Complex64]) -> Result<Complex64> {
    let n = la.level();
    if points.len() != n {
        return Err(Error::Domain(format!(
            "need exactly {n} eigenvalues for a level-{n} signature, got {}",
            points.len()
        )));
    }
    if n == 0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    // chi~ at the identity is Dim/Dim = 1, exactly.
    if points.iter().all(|u| (u - 1.0).norm() < 1e-14) {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let log_dim = match weyl_dim(la) {
        Ok(d) => (d as f64).ln(),
        Err(_) => log_weyl_dim(la),
    };

    const GAP_CLUSTER: f64 = 1e-5;
    let min_gap = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .map(|(i, j)| (points[i] - points[j]).norm())
        .fold(f64::INFINITY, f64::min);
    if n == 1 || min_gap > GAP_CLUSTER {
        return Ok(character_ratio(la, points, log_dim));
    }

    // Coincident points get symmetric phase offsets within their group, so
    // the perturbed value is an even analytic function of eps; Richardson
    // in eps^2 then converges quickly.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        points[i]
            .arg()
            .partial_cmp(&points[j].arg())
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut offsets = vec![0.0f64; n];
    let mut max_offset = 0.5f64;
    let mut inter_group_gap = f64::INFINITY;
    let mut g0 = 0usize;
    while g0 < n {
        let mut g1 = g0 + 1;
        while g1 < n && (points[order[g1]] - points[order[g1 - 1]]).norm() <= GAP_CLUSTER {
            g1 += 1;
        }
        let size = g1 - g0;
        for (j, &idx) in order[g0..g1].iter().enumerate() {
            offsets[idx] = j as f64 - (size as f64 - 1.0) / 2.0;
            max_offset = max_offset.max(offsets[idx].abs());
        }
        if g1 < n {
            inter_group_gap =
                inter_group_gap.min((points[order[g1]] - points[order[g1 - 1]]).norm());
        }
        g0 = g1;
    }
    let max_exp = (0..n)
        .map(|j| (la.entries()[j] + (n - 1 - j) as i64).unsigned_abs())
        .max()
        .unwrap_or(1) as f64;
    let mut eps0 = 0.2 / max_exp.max(10.0);
    if inter_group_gap.is_finite() {
        eps0 = eps0.min(inter_group_gap / (4.0 * max_offset));
    }
    let eval = |eps: f64| -> Complex64 {
        let perturbed: Vec<Complex64> = points
            .iter()
            .enumerate()
            .map(|(i, &u)| u * Complex64::from_polar(1.0, eps * offsets[i]))
            .collect();
        character_ratio(la, &perturbed, log_dim)
    };
    let v1 = eval(eps0);
    let v2 = eval(eps0 / 2.0);
    let v3 = eval(eps0 / 4.0);
    let r1 = (4.0 * v2 - v1) / 3.0;
    let r2 = (4.0 * v3 - v2) / 3.0;
    let s = (16.0 * r2 - r1) / 15.0;
    let spread = (r2 - r1).norm();
    if spread > 1e-5 * s.norm().max(1.0) {
        return Err(Error::Domain(format!(
            "character extrapolation did not settle (spread {spread:.3e}) at {la}"
        )));
    }
    Ok(s)
}

/// Direct Weyl-formula ratio for distinct points: the determinant of
/// `u_i^(la_j + N - j)` over the Vandermonde determinant, divided by the
/// dimension.
fn character_ratio(la: &Signature, points: &[Complex64], log_dim: f64) -> Complex64 {
    let n = la.level();
    let e = la.entries();
    let num = crate::numerics::CMatrix::from_fn(n, n, |i, j| {
        points[i].powi((e[j] + (n - 1 - j) as i64) as i32)
    });
    let den = crate::numerics::CMatrix::from_fn(n, n, |i, j| points[i].powi((n - 1 - j) as i32));
    let dnum = crate::numerics::det_complex(&num);
    let dden = crate::numerics::det_complex(&den);
    dnum / dden * (-log_dim).exp()
}

/// Result of restricting a zw-character to U(N) at a given spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacterRestriction {
    pub value: Complex64,
    /// truncation error bound: the normalized characters are bounded by 1,
    /// so the missing table mass bounds the error
    pub mass_defect: f64,
}

/// Evaluates `sum_la P_N(la) chi~^la(spectrum)` over a truncated table of
/// the zw-measure. Spectra shorter than `N` are padded with 1s.
pub fn zw_character_restriction(
    p: &ZwParams,
    n: usize,
    spectrum: &SpectrumList,
    mass_tolerance: f64,
) -> Result<CharacterRestriction> {
    if spectrum.len() > n {
        return Err(Error::Domain(format!(
            "spectrum has {} eigenvalues but the restriction level is {n}",
            spectrum.len()
        )));
    }
    let table = build_table(n, p, mass_tolerance)?;
    let mut points: Vec<Complex64> = spectrum.eigenvalues().to_vec();
    points.resize(n, Complex64::new(1.0, 0.0));

    let mut value = Complex64::new(0.0, 0.0);
    for (la, &lw) in &table.masses {
        let prob = (lw - table.log_target_total).exp();
        value += prob * normalized_character(la, &points)?;
    }
    Ok(CharacterRestriction {
        value,
        mass_defect: table.defect(),
    })
}
