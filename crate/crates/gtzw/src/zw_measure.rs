//! The four-parameter zw-measures on signatures: unnormalized weights,
//! exact normalization constants, admissibility classification,
//! Fourier-coefficient determinants and identity verification.

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::gt_graph::MeasureTable;
use crate::numerics::{log_gamma, log_sum_exp, normalize_phase, recip_gamma};
use crate::signatures::{log_weyl_dim, weyl_dim, Signature};
use crate::{Error, Result};

/// Classification of a parameter pair `(z, z')`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesClass {
    /// complex conjugate pair off the real plane
    Principal,
    /// real pair inside a common open unit interval `(m, m+1)`
    Complementary { m: i64 },
    /// one value equal to the integer `m`, the other real and `> m - 1`
    Degenerate { m: i64 },
    /// not in the parameter set: weights change sign
    Outside,
}

fn is_integer(x: f64) -> bool {
    x.fract() == 0.0 && x.is_finite()
}

/// Classifies a parameter pair. Comparisons are exact: the series boundaries
/// are algebraic conditions on user-entered values, not approximate ones.
pub fn classify(z: Complex64, z_prime: Complex64) -> SeriesClass {
    if z.im != 0.0 || z_prime.im != 0.0 {
        if z_prime == z.conj() && z.im != 0.0 {
            return SeriesClass::Principal;
        }
        return SeriesClass::Outside;
    }
    let (x, y) = (z.re, z_prime.re);
    let xi = is_integer(x);
    let yi = is_integer(y);
    if xi && yi {
        // both integral: the smaller one drives the vanishing pattern
        return SeriesClass::Degenerate { m: x.min(y) as i64 };
    }
    if xi {
        let m = x as i64;
        if y > (m - 1) as f64 {
            return SeriesClass::Degenerate { m };
        }
        return SeriesClass::Outside;
    }
    if yi {
        let m = y as i64;
        if x > (m - 1) as f64 {
            return SeriesClass::Degenerate { m };
        }
        return SeriesClass::Outside;
    }
    if x.floor() == y.floor() {
        return SeriesClass::Complementary {
            m: x.floor() as i64,
        };
    }
    SeriesClass::Outside
}

/// The parameter quadruple `(z, z', w, w')` of a zw-measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZwParams {
    pub z: Complex64,
    pub z_prime: Complex64,
    pub w: Complex64,
    pub w_prime: Complex64,
}

impl ZwParams {
    pub fn new(z: Complex64, z_prime: Complex64, w: Complex64, w_prime: Complex64) -> Self {
        ZwParams {
            z,
            z_prime,
            w,
            w_prime,
        }
    }

    /// Principal-series shorthand: `z' = conj z`, `w' = conj w`.
    pub fn principal(z: Complex64, w: Complex64) -> Self {
        ZwParams {
            z,
            z_prime: z.conj(),
            w,
            w_prime: w.conj(),
        }
    }

    pub fn from_reals(z: f64, z_prime: f64, w: f64, w_prime: f64) -> Self {
        ZwParams {
            z: Complex64::new(z, 0.0),
            z_prime: Complex64::new(z_prime, 0.0),
            w: Complex64::new(w, 0.0),
            w_prime: Complex64::new(w_prime, 0.0),
        }
    }

    pub fn series_class_z(&self) -> SeriesClass {
        classify(self.z, self.z_prime)
    }

    pub fn series_class_w(&self) -> SeriesClass {
        classify(self.w, self.w_prime)
    }

    pub fn re_sum(&self) -> f64 {
        self.z.re + self.z_prime.re + self.w.re + self.w_prime.re
    }

    /// Membership in the half-space where the weights are summable.
    pub fn in_domain(&self) -> bool {
        self.re_sum() > -1.0
    }

    /// Membership in the subdomain where the normalization constant is
    /// finite and nonzero: no cross sum `z + w` etc. at a Gamma pole.
    pub fn in_normalization_domain(&self) -> bool {
        self.cross_pole().is_none()
    }

    fn cross_pole(&self) -> Option<Complex64> {
        [
            self.z + self.w,
            self.z + self.w_prime,
            self.z_prime + self.w,
            self.z_prime + self.w_prime,
        ]
        .into_iter()
        .find(|s| s.im == 0.0 && s.re <= -1.0 && is_integer(s.re))
    }

    /// Explains which admissibility condition fails, if any.
    pub fn admissibility(&self) -> std::result::Result<(), String> {
        if !self.in_domain() {
            return Err(format!("Re(z+z'+w+w') = {} is not > -1", self.re_sum()));
        }
        let cz = self.series_class_z();
        let cw = self.series_class_w();
        if cz == SeriesClass::Outside {
            return Err(
                "(z, z') lies outside the principal, complementary and degenerate series".into(),
            );
        }
        if cw == SeriesClass::Outside {
            return Err(
                "(w, w') lies outside the principal, complementary and degenerate series".into(),
            );
        }
        if let (SeriesClass::Degenerate { m: k }, SeriesClass::Degenerate { m: l }) = (cz, cw) {
            if k + l < 1 {
                return Err(format!("doubly degenerate with k+l = {} < 1", k + l));
            }
        }
        Ok(())
    }

    pub fn is_admissible(&self) -> bool {
        self.admissibility().is_ok()
    }

    /// Finite support bounds implied by degenerate parameter pairs:
    /// `la_1 <= k` from the z-side, `la_N >= -l` from the w-side.
    pub fn degenerate_bounds(&self) -> (Option<i64>, Option<i64>) {
        let upper = match self.series_class_z() {
            SeriesClass::Degenerate { m } => Some(m),
            _ => None,
        };
        let lower = match self.series_class_w() {
            SeriesClass::Degenerate { m } => Some(-m),
            _ => None,
        };
        (upper, lower)
    }
}

// Wire format: {"z": [re, im] | re, "z_prime"?: ..., "w": ..., "w_prime"?: ...};
// omitted primed entries expand to complex conjugates.
impl Serialize for ZwParams {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = ser.serialize_struct("ZwParams", 4)?;
        st.serialize_field("z", &[self.z.re, self.z.im])?;
        st.serialize_field("z_prime", &[self.z_prime.re, self.z_prime.im])?;
        st.serialize_field("w", &[self.w.re, self.w.im])?;
        st.serialize_field("w_prime", &[self.w_prime.re, self.w_prime.im])?;
        st.end()
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumOrPair {
    Num(f64),
    Pair([f64; 2]),
}

impl NumOrPair {
    fn to_complex(&self) -> Complex64 {
        match self {
            NumOrPair::Num(x) => Complex64::new(*x, 0.0),
            NumOrPair::Pair([re, im]) => Complex64::new(*re, *im),
        }
    }
}

impl<'de> Deserialize<'de> for ZwParams {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            z: NumOrPair,
            z_prime: Option<NumOrPair>,
            w: NumOrPair,
            w_prime: Option<NumOrPair>,
        }
        let raw = Raw::deserialize(de)?;
        let z = raw.z.to_complex();
        let w = raw.w.to_complex();
        Ok(ZwParams {
            z,
            z_prime: raw
                .z_prime
                .map(|v| v.to_complex())
                .unwrap_or_else(|| z.conj()),
            w,
            w_prime: raw
                .w_prime
                .map(|v| v.to_complex())
                .unwrap_or_else(|| w.conj()),
        })
    }
}

/// Parses "re" or "re,im" into a complex number (CLI flag format).
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Domain(format!("cannot parse '{t}' as a number")))
    };
    match parts.as_slice() {
        [re] => Ok(Complex64::new(parse(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(parse(re)?, parse(im)?)),
        _ => Err(Error::Domain(format!(
            "expected 're' or 're,im', got '{s}'"
        ))),
    }
}

fn log_dim(la: &Signature) -> f64 {
    match weyl_dim(la) {
        Ok(d) => (d as f64).ln(),
        Err(_) => log_weyl_dim(la),
    }
}

/// The four Gamma arguments of one coordinate of the weight product.
fn coordinate_args(la: &Signature, p: &ZwParams, i: usize) -> [Complex64; 4] {
    let n = la.level() as f64;
    let li = la.entries()[i - 1] as f64;
    let ii = i as f64;
    [
        p.z - li + ii,
        p.z_prime - li + ii,
        p.w + n + 1.0 + li - ii,
        p.w_prime + n + 1.0 + li - ii,
    ]
}

fn is_gamma_pole(a: Complex64) -> bool {
    a.im == 0.0 && a.re <= 0.0 && is_integer(a.re)
}

/// log of the unnormalized weight of `la`, or `None` when the weight is an
/// exact zero (a Gamma pole in a degenerate series).
///
/// For admissible parameters the weight is a nonnegative real; a residual
/// phase after accumulating the Gamma factors signals non-admissible input
/// and is returned as an error. Use [`p_prime_complex`] to explore those.
pub fn log_p_prime(la: &Signature, p: &ZwParams) -> Result<Option<f64>> {
    let n = la.level();
    let mut log_mod = 2.0 * log_dim(la);
    let mut phase = 0.0f64;
    for i in 1..=n {
        for a in coordinate_args(la, p, i) {
            if is_gamma_pole(a) {
                return Ok(None);
            }
            let lg = log_gamma(a)?;
            log_mod -= lg.log_modulus;
            phase -= lg.phase;
        }
    }
    let ph = normalize_phase(phase);
    if ph.abs() > 1e-6 {
        return Err(Error::NotAdmissible(format!(
            "weight at {la} has residual phase {ph:.3e}; parameters are outside the admissible set"
        )));
    }
    Ok(Some(log_mod))
}

/// Unnormalized weight in linear scale as a complex number (diagnostic mode
/// for parameters outside the admissible set, where weights need not be
/// positive reals).
pub fn p_prime_complex(la: &Signature, p: &ZwParams) -> Complex64 {
    let n = la.level();
    let mut lc = crate::numerics::LogComplex::new(2.0 * log_dim(la), 0.0);
    for i in 1..=n {
        for a in coordinate_args(la, p, i) {
            if is_gamma_pole(a) {
                return Complex64::new(0.0, 0.0);
            }
            match log_gamma(a) {
                Ok(lg) => lc = lc.div(&lg),
                Err(_) => return Complex64::new(0.0, 0.0),
            }
        }
    }
    lc.value()
}

/// log of the exact normalization constant
/// `S_N = prod_i Gamma(sigma + i) / (Gamma(z+w+i) Gamma(z+w'+i) Gamma(z'+w+i) Gamma(z'+w'+i) Gamma(i))`
/// where `sigma = z + z' + w + w'`.
///
/// Requires the parameters to lie in the normalization subdomain (no cross
/// sum at a Gamma pole); errors if the resulting value is not a positive
/// real, which cannot happen for admissible parameters.
pub fn log_s_n(n: usize, p: &ZwParams) -> Result<f64> {
    if !p.in_domain() {
        return Err(Error::OutsideDomain(format!(
            "Re(z+z'+w+w') = {} <= -1",
            p.re_sum()
        )));
    }
    if let Some(s) = p.cross_pole() {
        return Err(Error::OutsideDomain(format!(
            "cross sum {s} is a nonpositive integer: S_N vanishes"
        )));
    }
    let sigma = p.z + p.z_prime + p.w + p.w_prime;
    let mut log_mod = 0.0f64;
    let mut phase = 0.0f64;
    for i in 1..=n {
        let ii = i as f64;
        let top = log_gamma(sigma + ii)?;
        log_mod += top.log_modulus;
        phase += top.phase;
        for a in [
            p.z + p.w,
            p.z + p.w_prime,
            p.z_prime + p.w,
            p.z_prime + p.w_prime,
        ] {
            let lg = log_gamma(a + ii)?;
            log_mod -= lg.log_modulus;
            phase -= lg.phase;
        }
        log_mod -= log_gamma(Complex64::new(ii, 0.0))?.log_modulus;
    }
    let ph = normalize_phase(phase);
    if ph.abs() > 1e-6 {
        return Err(Error::OutsideDomain(format!(
            "S_{n} has residual phase {ph:.3e}; not a positive real"
        )));
    }
    Ok(log_mod)
}

/// Resolved per-coordinate bounds of a truncation box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportBox {
    pub lower: i64,
    pub upper: i64,
}

impl SupportBox {
    pub fn new(lower: i64, upper: i64) -> Result<Self> {
        if lower > upper {
            return Err(Error::Domain(format!(
                "support box [{lower}, {upper}] is empty"
            )));
        }
        Ok(SupportBox { lower, upper })
    }

    /// Number of weakly decreasing N-tuples with entries in the box.
    pub fn count(&self, level: usize) -> f64 {
        // C(width + level - 1, level)
        let width = (self.upper - self.lower + 1) as f64;
        let mut c = 1.0f64;
        for j in 0..level {
            c *= (width + j as f64) / (j as f64 + 1.0);
        }
        c
    }
}

/// All weakly decreasing `level`-tuples with entries in the box, visited in
/// lexicographic order.
pub fn signatures_in_box(level: usize, b: SupportBox, mut visit: impl FnMut(&Signature)) {
    if level == 0 {
        visit(&Signature::empty());
        return;
    }
    let mut cur = vec![0i64; level];
    fn rec(
        level: usize,
        b: SupportBox,
        idx: usize,
        cur: &mut Vec<i64>,
        visit: &mut impl FnMut(&Signature),
    ) {
        if idx == level {
            visit(&Signature::new(cur.clone()).expect("constructed weakly decreasing"));
            return;
        }
        let hi = if idx == 0 { b.upper } else { cur[idx - 1] };
        for v in b.lower..=hi {
            cur[idx] = v;
            rec(level, b, idx + 1, cur, visit);
        }
    }
    rec(level, b, 0, &mut cur, &mut visit);
}

/// Growth cap per coordinate for adaptive truncation boxes.
pub const BOX_COORDINATE_CAP: i64 = 1 << 14;
/// Enumeration budget: bail out before visiting more signatures than this.
pub const BOX_ENUMERATION_BUDGET: f64 = 2e7;

/// Builds the truncated probability table of the level-`n` zw-measure.
///
/// Degenerate parameter pairs pin the box exactly; otherwise the box starts
/// at `|la_i| <= 4` and doubles until the captured mass is within
/// `mass_tolerance` of the exact normalization constant.
pub fn build_table(n: usize, p: &ZwParams, mass_tolerance: f64) -> Result<MeasureTable> {
    p.admissibility().map_err(Error::NotAdmissible)?;
    let log_s = log_s_n(n, p)?;
    let (upper_fixed, lower_fixed) = p.degenerate_bounds();

    let mut half_width: i64 = 4;
    loop {
        let b = SupportBox::new(
            lower_fixed.unwrap_or(-half_width),
            upper_fixed.unwrap_or(half_width),
        )?;
        if b.count(n) > BOX_ENUMERATION_BUDGET {
            return Err(Error::GrowthLimit {
                cap: half_width,
                defect: f64::NAN,
            });
        }
        let mut masses = std::collections::BTreeMap::new();
        let mut logs = Vec::new();
        let mut first_err: Option<Error> = None;
        signatures_in_box(n, b, |la| {
            if first_err.is_some() {
                return;
            }
            match log_p_prime(la, p) {
                Ok(Some(lw)) => {
                    masses.insert(la.clone(), lw);
                    logs.push(lw);
                }
                Ok(None) => {}
                Err(e) => first_err = Some(e),
            }
        });
        if let Some(e) = first_err {
            return Err(e);
        }
        let log_captured = if logs.is_empty() {
            f64::NEG_INFINITY
        } else {
            log_sum_exp(&logs)?
        };

        let exact_box = upper_fixed.is_some() && lower_fixed.is_some();
        let captured_ratio = (log_captured - log_s).exp();
        if exact_box || captured_ratio >= 1.0 - mass_tolerance {
            return Ok(MeasureTable {
                level: n,
                masses,
                log_total_captured: log_captured,
                log_target_total: log_s,
            });
        }
        if half_width >= BOX_COORDINATE_CAP {
            return Err(Error::GrowthLimit {
                cap: BOX_COORDINATE_CAP,
                defect: 1.0 - captured_ratio,
            });
        }
        half_width *= 2;
    }
}

/// Closed-form Fourier coefficient of `f_{z,w|N}` on the irreducible
/// character basis:
/// `c(la) = Dim(la) * prod_i Gamma(z+w+i) Gamma(i) / (Gamma(z-la_i+i) Gamma(w+N+1+la_i-i))`.
pub fn fourier_coefficient(la: &Signature, z: Complex64, w: Complex64) -> Result<Complex64> {
    let n = la.level();
    let dim = match weyl_dim(la) {
        Ok(d) => d as f64,
        Err(_) => log_weyl_dim(la).exp(),
    };
    let mut acc = Complex64::new(dim, 0.0);
    for i in 1..=n {
        let ii = i as f64;
        let li = la.entries()[i - 1] as f64;
        acc *= log_gamma(z + w + ii)?.value();
        acc *= log_gamma(Complex64::new(ii, 0.0))?.value();
        acc *= recip_gamma(z - li + ii);
        acc *= recip_gamma(w + n as f64 + 1.0 + li - ii);
    }
    Ok(acc)
}

/// One-dimensional Fourier coefficient
/// `c_{z,w|1}(l) = Gamma(1+z+w) / (Gamma(1+z-l) Gamma(1+w+l))`.
pub fn fourier_coefficient_1d(l: i64, z: Complex64, w: Complex64) -> Result<Complex64> {
    let lf = l as f64;
    Ok(log_gamma(z + w + 1.0)?.value() * recip_gamma(z - lf + 1.0) * recip_gamma(w + lf + 1.0))
}

/// Verification route for the Fourier coefficient: the determinant
/// `det[c_{z,w|1}(la_i - i + j)]` of one-dimensional coefficients, with the
/// elimination done in double-word arithmetic.
pub fn fourier_coefficient_det(la: &Signature, z: Complex64, w: Complex64) -> Result<Complex64> {
    use crate::numerics::dd::{det_cdd, CDd};
    let n = la.level();
    let e = la.entries();
    let mut m = vec![CDd::ZERO; n * n];
    for i in 1..=n {
        for j in 1..=n {
            let l = e[i - 1] - i as i64 + j as i64;
            m[(i - 1) * n + (j - 1)] = CDd::from_complex(fourier_coefficient_1d(l, z, w)?);
        }
    }
    Ok(det_cdd(m, n).to_complex())
}

/// Report of a bilateral-sum identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DougallReport {
    pub lhs_partial: Complex64,
    pub rhs: Complex64,
    pub abs_error: f64,
    pub terms: usize,
}

/// Partial bilateral sum
/// `sum_k 1/(Gamma(z-k+1) Gamma(z'-k+1) Gamma(w+k+1) Gamma(w'+k+1))`
/// against its closed form
/// `Gamma(z+z'+w+w'+1) / (Gamma(z+w+1) Gamma(z+w'+1) Gamma(z'+w+1) Gamma(z'+w'+1))`.
///
/// The window is `k in [-K-1, K]`: the `2K+2` integers centered at `-1/2`,
/// so `K = 0` already covers the support `{0, -1}` of the doubly degenerate
/// quadruple `(0, 0, 1, 1)`.
pub fn verify_dougall(p: &ZwParams, truncation: usize) -> Result<DougallReport> {
    if !p.in_domain() {
        return Err(Error::OutsideDomain(format!(
            "Re(z+z'+w+w') = {} <= -1",
            p.re_sum()
        )));
    }
    let k_max = truncation as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    let mut comp = Complex64::new(0.0, 0.0);
    let mut terms = 0usize;
    for k in (-k_max - 1)..=k_max {
        let kf = k as f64;
        // Each term is assembled in log scale: the individual Gamma values
        // overflow long before the term itself leaves [0, O(1)].
        let mut lc = crate::numerics::LogComplex::zero_log();
        let mut zero = false;
        for a in [
            p.z - kf + 1.0,
            p.z_prime - kf + 1.0,
            p.w + kf + 1.0,
            p.w_prime + kf + 1.0,
        ] {
            if is_gamma_pole(a) {
                zero = true;
                break;
            }
            lc = lc.div(&log_gamma(a)?);
        }
        let t = if zero {
            Complex64::new(0.0, 0.0)
        } else {
            lc.value()
        };
        // Kahan step, componentwise
        let y = t - comp;
        let s = sum + y;
        comp = (s - sum) - y;
        sum = s;
        terms += 1;
    }
    let sigma = p.z + p.z_prime + p.w + p.w_prime;
    let rhs = log_gamma(sigma + 1.0)?.value()
        * recip_gamma(p.z + p.w + 1.0)
        * recip_gamma(p.z + p.w_prime + 1.0)
        * recip_gamma(p.z_prime + p.w + 1.0)
        * recip_gamma(p.z_prime + p.w_prime + 1.0);
    Ok(DougallReport {
        lhs_partial: sum,
        rhs,
        abs_error: (sum - rhs).norm(),
        terms,
    })
}

/// Report of the determinant-product identity check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrattenthalerReport {
    pub lhs_det: Complex64,
    pub rhs_product: Complex64,
    pub rel_error: f64,
}

/// Checks
/// `det[prod_{k<j}(x_i + a_k) prod_{k>=j}(x_i + b_k)] =
///  prod_{i<j}(x_i - x_j) prod_{i<=j}(a_i - b_j)`
/// for `|x| = N`, `|a| = |b| = N - 1`.
///
/// The determinant side is evaluated in double-word arithmetic: when the
/// right-hand side nearly cancels, the determinant is small against its
/// cofactors and f64 elimination cannot reach the target accuracy.
pub fn verify_krattenthaler(
    x: &[i64],
    a: &[Complex64],
    b: &[Complex64],
) -> Result<KrattenthalerReport> {
    use crate::numerics::dd::{det_cdd, CDd};
    let n = x.len();
    if a.len() + 1 != n || b.len() + 1 != n {
        return Err(Error::Domain(format!(
            "need |a| = |b| = N-1, got N = {n}, |a| = {}, |b| = {}",
            a.len(),
            b.len()
        )));
    }
    let mut m = vec![CDd::ZERO; n * n];
    for i in 0..n {
        let xi = CDd::from_complex(Complex64::new(x[i] as f64, 0.0));
        for j in 0..n {
            let mut entry = CDd::ONE;
            // 1-based: factors (x_i + a_k) for k < j, (x_i + b_k) for k >= j
            for &ak in a.iter().take(j) {
                entry = entry * (xi + CDd::from_complex(ak));
            }
            for &bk in b.iter().skip(j) {
                entry = entry * (xi + CDd::from_complex(bk));
            }
            m[i * n + j] = entry;
        }
    }
    let lhs = det_cdd(m, n).to_complex();
    let mut rhs = Complex64::new(1.0, 0.0);
    for (i, &xi) in x.iter().enumerate() {
        for &xj in x.iter().skip(i + 1) {
            rhs *= Complex64::new((xi - xj) as f64, 0.0);
        }
    }
    for (i, &ai) in a.iter().enumerate() {
        for &bj in b.iter().skip(i) {
            rhs *= ai - bj;
        }
    }
    let rel_error = (lhs - rhs).norm() / rhs.norm().max(1e-300);
    Ok(KrattenthalerReport {
        lhs_det: lhs,
        rhs_product: rhs,
        rel_error,
    })
}

/// Squared Hilbert norm of `f_{z,w|N}`:
/// `prod_k Gamma(k) Gamma(k + z + conj z + w + conj w) / |Gamma(k + z + conj w)|^2`.
pub fn zw_norm_squared(n: usize, z: Complex64, w: Complex64) -> Result<f64> {
    if z.re + w.re <= -0.5 {
        return Err(Error::Domain(format!(
            "Re z + Re w = {} must exceed -1/2 for square integrability",
            z.re + w.re
        )));
    }
    let s = 2.0 * (z.re + w.re);
    let cross = z + w.conj();
    let mut log = 0.0f64;
    for k in 1..=n {
        let kf = k as f64;
        log += log_gamma(Complex64::new(kf, 0.0))?.log_modulus;
        log += log_gamma(Complex64::new(kf + s, 0.0))?.log_modulus;
        log -= 2.0 * log_gamma(cross + kf)?.log_modulus;
    }
    Ok(log.exp())
}

#[cfg(test)]
mod tests;
