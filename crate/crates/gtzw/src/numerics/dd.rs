//! Double-word ("double-double") arithmetic, about 31 significant digits.
//!
//! Used where the verification determinants cancel many leading digits:
//! an identity check at 1e-10 relative accuracy needs the two routes
//! evaluated well past f64 when the determinant is tiny against its
//! cofactors. Algorithms follow the classic error-free transformations
//! (two_sum, fma-based two_prod).

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2) = quick_two_sum(s1, s2 + t1);
        let (hi, lo) = quick_two_sum(s1, s2 + t2);
        Dd { hi, lo }
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        let (hi, lo) = quick_two_sum(p1, p2);
        Dd { hi, lo }
    }
}

impl std::ops::Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o * Dd::from_f64(q1);
        let q2 = (r.hi + r.lo) / o.hi;
        let (hi, lo) = quick_two_sum(q1, q2);
        Dd { hi, lo }
    }
}

/// Complex number with double-word components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd {
        re: Dd::ZERO,
        im: Dd::ZERO,
    };
    pub const ONE: CDd = CDd {
        re: Dd { hi: 1.0, lo: 0.0 },
        im: Dd::ZERO,
    };

    pub fn from_complex(v: num_complex::Complex64) -> CDd {
        CDd {
            re: Dd::from_f64(v.re),
            im: Dd::from_f64(v.im),
        }
    }

    pub fn to_complex(self) -> num_complex::Complex64 {
        num_complex::Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn conj(self) -> CDd {
        CDd {
            re: self.re,
            im: -self.im,
        }
    }

    /// Approximate squared modulus, good enough for pivot selection.
    pub fn norm_sqr_approx(self) -> f64 {
        self.re.hi * self.re.hi + self.im.hi * self.im.hi
    }
}

impl std::ops::Add for CDd {
    type Output = CDd;
    fn add(self, o: CDd) -> CDd {
        CDd {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }
}

impl std::ops::Sub for CDd {
    type Output = CDd;
    fn sub(self, o: CDd) -> CDd {
        CDd {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

impl std::ops::Neg for CDd {
    type Output = CDd;
    fn neg(self) -> CDd {
        CDd {
            re: -self.re,
            im: -self.im,
        }
    }
}

impl std::ops::Mul for CDd {
    type Output = CDd;
    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }
}

impl std::ops::Div for CDd {
    type Output = CDd;
    fn div(self, o: CDd) -> CDd {
        let denom = o.re * o.re + o.im * o.im;
        let num = self * o.conj();
        CDd {
            re: num.re / denom,
            im: num.im / denom,
        }
    }
}

/// Determinant of a row-major `n x n` matrix of double-word complex
/// entries, by partial-pivoted elimination carried out entirely in
/// double-word arithmetic.
pub fn det_cdd(mut a: Vec<CDd>, n: usize) -> CDd {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return CDd::ONE;
    }
    let mut det = CDd::ONE;
    for col in 0..n {
        let mut pivot = col;
        let mut best = a[col * n + col].norm_sqr_approx();
        for r in (col + 1)..n {
            let v = a[r * n + col].norm_sqr_approx();
            if v > best {
                best = v;
                pivot = r;
            }
        }
        if best == 0.0 {
            return CDd::ZERO;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det = det * p;
        for r in (col + 1)..n {
            let factor = a[r * n + col] / p;
            if factor.norm_sqr_approx() == 0.0 {
                continue;
            }
            for j in col..n {
                let v = a[col * n + j];
                a[r * n + j] = a[r * n + j] - factor * v;
            }
        }
    }
    det
}
