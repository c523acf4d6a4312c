//! Signatures (dominant weights of U(N)), interlacing, Weyl dimensions and
//! Frobenius coordinates.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A weakly decreasing integer tuple. The empty tuple is the single vertex
/// of level 0.
///
/// Serializes as a plain JSON integer array. Ordering is lexicographic on
/// the entries, which fixes enumeration and table order everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Signature {
    entries: Vec<i64>,
}

impl Signature {
    pub fn new(entries: Vec<i64>) -> Result<Self> {
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotDecreasing(entries));
        }
        Ok(Signature { entries })
    }

    pub fn empty() -> Self {
        Signature { entries: vec![] }
    }

    pub fn zero(level: usize) -> Self {
        Signature {
            entries: vec![0; level],
        }
    }

    pub fn level(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// Number of boxes counted with sign.
    pub fn weight(&self) -> i64 {
        self.entries.iter().sum()
    }

    /// The dual signature `(-lambda_N, ..., -lambda_1)`.
    pub fn dual(&self) -> Signature {
        let mut e: Vec<i64> = self.entries.iter().map(|&x| -x).collect();
        e.reverse();
        Signature { entries: e }
    }
}

impl std::fmt::Display for Signature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "()");
        }
        write!(f, "(")?;
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// True iff `nu` interlaces `la`: `la_i >= nu_i >= la_{i+1}` for all i.
/// Levels must differ by exactly one.
pub fn interlaces(nu: &Signature, la: &Signature) -> Result<bool> {
    if nu.level() + 1 != la.level() {
        return Err(Error::LevelMismatch {
            lo: nu.level(),
            hi: la.level(),
            expected: 1,
        });
    }
    let l = la.entries();
    let n = nu.entries();
    for i in 0..n.len() {
        if !(l[i] >= n[i] && n[i] >= l[i + 1]) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// All signatures one level down that interlace `la`, in lexicographic order.
///
/// The interlacing constraints decouple per coordinate: `nu_i` ranges over
/// `[la_{i+1}, la_i]` independently, and weak decrease is automatic.
pub fn enumerate_down(la: &Signature) -> Vec<Signature> {
    let n = la.level();
    if n == 0 {
        return vec![];
    }
    if n == 1 {
        return vec![Signature::empty()];
    }
    let l = la.entries();
    let mut out = Vec::new();
    let mut current = vec![0i64; n - 1];
    fn rec(l: &[i64], idx: usize, current: &mut Vec<i64>, out: &mut Vec<Signature>) {
        if idx == current.len() {
            out.push(Signature {
                entries: current.clone(),
            });
            return;
        }
        for v in l[idx + 1]..=l[idx] {
            current[idx] = v;
            rec(l, idx + 1, current, out);
        }
    }
    rec(l, 0, &mut current, &mut out);
    out
}

/// Exact Weyl dimension `prod_{i<j} (la_i - la_j + j - i)/(j - i)` as a
/// 128-bit integer, with overflow detection.
pub fn weyl_dim(la: &Signature) -> Result<i128> {
    let n = la.level();
    let e = la.entries();
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for j in 1..n {
        for i in 0..j {
            let f = (e[i] - e[j]) as i128 + (j - i) as i128;
            num = num
                .checked_mul(f)
                .ok_or(Error::Overflow("weyl_dim numerator"))?;
            den = den
                .checked_mul((j - i) as i128)
                .ok_or(Error::Overflow("weyl_dim denominator"))?;
            let g = gcd(num, den);
            num /= g;
            den /= g;
        }
    }
    debug_assert_eq!(den, 1, "Weyl dimension must be an integer");
    Ok(num / den)
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// log of the Weyl dimension, for levels where the exact value overflows.
pub fn log_weyl_dim(la: &Signature) -> f64 {
    let n = la.level();
    let e = la.entries();
    let mut acc = 0.0f64;
    for j in 1..n {
        for i in 0..j {
            acc += (((e[i] - e[j]) + (j - i) as i64) as f64).ln();
            acc -= ((j - i) as f64).ln();
        }
    }
    acc
}

/// A Young diagram: weakly decreasing nonnegative integers, no trailing zeros.
pub type Diagram = Vec<i64>;

fn transpose(nu: &[i64]) -> Diagram {
    if nu.is_empty() {
        return vec![];
    }
    let cols = nu[0];
    (1..=cols)
        .map(|c| nu.iter().filter(|&&r| r >= c).count() as i64)
        .collect()
}

fn diagonal_length(nu: &[i64]) -> usize {
    nu.iter()
        .enumerate()
        .take_while(|(i, &r)| r >= (i + 1) as i64)
        .count()
}

/// Positive/negative parts of a signature with their modified Frobenius
/// coordinates `p~_i = nu_i - i + 1/2`, `q~_i = nu'_i - i + 1/2`.
///
/// The coordinates are half-integers, stored exactly in doubled form; the
/// `f64` views are exact as well (an integer plus one half).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusSplit {
    pub plus_part: Diagram,
    pub minus_part: Diagram,
    /// 2 * p~ of the plus part, one entry per diagonal box
    pub two_p_plus: Vec<i64>,
    pub two_q_plus: Vec<i64>,
    pub two_p_minus: Vec<i64>,
    pub two_q_minus: Vec<i64>,
    pub size_plus: i64,
    pub size_minus: i64,
}

impl FrobeniusSplit {
    pub fn modified_p_plus(&self) -> Vec<f64> {
        self.two_p_plus.iter().map(|&x| x as f64 / 2.0).collect()
    }
    pub fn modified_q_plus(&self) -> Vec<f64> {
        self.two_q_plus.iter().map(|&x| x as f64 / 2.0).collect()
    }
    pub fn modified_p_minus(&self) -> Vec<f64> {
        self.two_p_minus.iter().map(|&x| x as f64 / 2.0).collect()
    }
    pub fn modified_q_minus(&self) -> Vec<f64> {
        self.two_q_minus.iter().map(|&x| x as f64 / 2.0).collect()
    }
}

fn modified_frobenius(nu: &[i64]) -> (Vec<i64>, Vec<i64>) {
    let d = diagonal_length(nu);
    let nu_t = transpose(nu);
    let two_p = (0..d).map(|i| 2 * nu[i] - 2 * (i as i64) - 1).collect();
    let two_q = (0..d).map(|i| 2 * nu_t[i] - 2 * (i as i64) - 1).collect();
    (two_p, two_q)
}

/// Splits a signature into positive and negative Young diagrams and computes
/// their modified Frobenius coordinates.
pub fn frobenius_split(la: &Signature) -> FrobeniusSplit {
    let plus: Diagram = la.entries().iter().copied().filter(|&x| x > 0).collect();
    let minus: Diagram = la
        .entries()
        .iter()
        .rev()
        .copied()
        .filter(|&x| x < 0)
        .map(|x| -x)
        .collect();
    let (two_p_plus, two_q_plus) = modified_frobenius(&plus);
    let (two_p_minus, two_q_minus) = modified_frobenius(&minus);
    FrobeniusSplit {
        size_plus: plus.iter().sum(),
        size_minus: minus.iter().sum(),
        plus_part: plus,
        minus_part: minus,
        two_p_plus,
        two_q_plus,
        two_p_minus,
        two_q_minus,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sig(e: &[i64]) -> Signature {
        Signature::new(e.to_vec()).unwrap()
    }

    #[test]
    fn constructor_rejects_increasing() {
        assert!(Signature::new(vec![1, 2]).is_err());
        assert!(Signature::new(vec![2, 2, -1]).is_ok());
    }

    #[test]
    fn interlacing_examples() {
        assert!(interlaces(&sig(&[1]), &sig(&[2, 0])).unwrap());
        assert!(!interlaces(&sig(&[3]), &sig(&[2, 0])).unwrap());
        assert!(interlaces(&sig(&[2, 1]), &sig(&[2, 1, 1])).unwrap());
        assert!(interlaces(&sig(&[]), &sig(&[5])).unwrap());
        assert!(interlaces(&sig(&[1]), &sig(&[1])).is_err());
    }

    #[test]
    fn enumerate_down_examples() {
        assert_eq!(enumerate_down(&sig(&[1, 0])), vec![sig(&[0]), sig(&[1])]);
        assert_eq!(
            enumerate_down(&sig(&[2, 0])),
            vec![sig(&[0]), sig(&[1]), sig(&[2])]
        );
        assert_eq!(enumerate_down(&sig(&[5])), vec![Signature::empty()]);
        // lexicographic order and no duplicates on a wider example
        let down = enumerate_down(&sig(&[2, 1, -1]));
        let mut sorted = down.clone();
        sorted.sort();
        sorted.dedup();
        assert_eq!(down, sorted);
        for nu in &down {
            assert!(interlaces(nu, &sig(&[2, 1, -1])).unwrap());
        }
        assert_eq!(down.len(), 2 * 3); // [1,2] x [-1,1]
    }

    #[test]
    fn weyl_dim_examples() {
        assert_eq!(weyl_dim(&sig(&[7])).unwrap(), 1);
        assert_eq!(weyl_dim(&Signature::empty()).unwrap(), 1);
        assert_eq!(weyl_dim(&sig(&[1, 0])).unwrap(), 2);
        assert_eq!(weyl_dim(&sig(&[2, 1, 0])).unwrap(), 8);
    }

    /// Brute-force path count from the empty signature, the independent
    /// dimension oracle.
    fn path_count(la: &Signature) -> i128 {
        if la.level() == 0 {
            return 1;
        }
        enumerate_down(la).iter().map(path_count).sum()
    }

    fn box_signatures(level: usize, bound: i64) -> Vec<Signature> {
        let mut out = Vec::new();
        let mut cur = vec![0i64; level];
        fn rec(level: usize, bound: i64, idx: usize, cur: &mut Vec<i64>, out: &mut Vec<Signature>) {
            if idx == level {
                out.push(Signature::new(cur.clone()).unwrap());
                return;
            }
            let hi = if idx == 0 { bound } else { cur[idx - 1] };
            for v in -bound..=hi {
                cur[idx] = v;
                rec(level, bound, idx + 1, cur, out);
            }
        }
        rec(level, bound, 0, &mut cur, &mut out);
        out
    }

    #[test]
    fn weyl_dim_equals_path_count() {
        for n in 1..=4 {
            for la in box_signatures(n, 4) {
                assert_eq!(
                    weyl_dim(&la).unwrap(),
                    path_count(&la),
                    "dimension vs path count at {la}"
                );
            }
        }
    }

    #[test]
    fn branching_consistency() {
        // sum over nu < la of Dim(nu) equals Dim(la), exactly.
        for n in 2..=5 {
            for la in box_signatures(n, if n <= 3 { 5 } else { 3 }) {
                let sum: i128 = enumerate_down(&la)
                    .iter()
                    .map(|nu| weyl_dim(nu).unwrap())
                    .sum();
                assert_eq!(sum, weyl_dim(&la).unwrap(), "branching at {la}");
            }
        }
    }

    #[test]
    fn weyl_dim_duality() {
        for la in box_signatures(4, 3) {
            assert_eq!(weyl_dim(&la).unwrap(), weyl_dim(&la.dual()).unwrap());
        }
    }

    #[test]
    fn log_weyl_dim_matches_exact() {
        for la in box_signatures(3, 5) {
            let exact = weyl_dim(&la).unwrap() as f64;
            assert!((log_weyl_dim(&la) - exact.ln()).abs() < 1e-12 * exact.ln().abs().max(1.0));
        }
    }

    #[test]
    fn weyl_dim_overflow_detected() {
        let big = Signature::new((0..25).rev().map(|i| i * 1_000_000).collect()).unwrap();
        assert!(matches!(weyl_dim(&big), Err(Error::Overflow(_))));
    }

    #[test]
    fn frobenius_examples() {
        let f = frobenius_split(&sig(&[0, 0, 0]));
        assert!(f.plus_part.is_empty() && f.minus_part.is_empty());
        assert_eq!(f.size_plus, 0);
        assert_eq!(f.size_minus, 0);

        let f = frobenius_split(&sig(&[3, 1, 0, -2]));
        assert_eq!(f.plus_part, vec![3, 1]);
        assert_eq!(f.minus_part, vec![2]);
        assert_eq!(f.modified_p_plus(), vec![2.5]);
        assert_eq!(f.modified_q_plus(), vec![1.5]);
        assert_eq!(f.size_plus, 4);
        assert_eq!(f.modified_p_minus(), vec![1.5]);
        assert_eq!(f.modified_q_minus(), vec![0.5]);
        assert_eq!(f.size_minus, 2);

        let f = frobenius_split(&sig(&[1, 1]));
        assert_eq!(f.plus_part, vec![1, 1]);
        assert_eq!(f.modified_p_plus(), vec![0.5]);
        assert_eq!(f.modified_q_plus(), vec![1.5]);
        assert_eq!(f.size_plus, 2);
    }

    /// Transpose computed by the dual route: build the transposed diagram
    /// box by box instead of counting rows.
    fn transpose_oracle(nu: &[i64]) -> Vec<i64> {
        let mut t: Vec<i64> = vec![];
        for &row in nu {
            for c in 0..row as usize {
                if t.len() <= c {
                    t.push(0);
                }
                t[c] += 1;
            }
        }
        t
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn frobenius_identity_random_diagrams(raw in proptest::collection::vec(0i64..14, 0..10)) {
            let mut d = raw.clone();
            d.sort_unstable_by(|a, b| b.cmp(a));
            while d.last() == Some(&0) { d.pop(); }
            let (two_p, two_q) = modified_frobenius(&d);
            let total: i64 = two_p.iter().sum::<i64>() + two_q.iter().sum::<i64>();
            prop_assert_eq!(total, 2 * d.iter().sum::<i64>(), "sum rule for {:?}", d);
            // strictly decreasing positive coordinates
            prop_assert!(two_p.windows(2).all(|w| w[0] > w[1]));
            prop_assert!(two_q.windows(2).all(|w| w[0] > w[1]));
            prop_assert!(two_p.iter().all(|&x| x > 0));
            prop_assert!(two_q.iter().all(|&x| x > 0));
            prop_assert_eq!(transpose(&d), transpose_oracle(&d));
        }

        #[test]
        fn enumerate_down_matches_interlaces(raw in proptest::collection::vec(-4i64..5, 2..5)) {
            let mut e = raw.clone();
            e.sort_unstable_by(|a, b| b.cmp(a));
            let la = Signature::new(e).unwrap();
            let down = enumerate_down(&la);
            for nu in &down {
                prop_assert!(interlaces(nu, &la).unwrap());
            }
            // count agrees with the product of range widths
            let l = la.entries();
            let expected: i64 = (0..l.len() - 1).map(|i| l[i] - l[i + 1] + 1).product();
            prop_assert_eq!(down.len() as i64, expected);
        }
    }

    #[test]
    fn serde_as_integer_array() {
        let la = sig(&[2, 0, -1]);
        assert_eq!(serde_json::to_string(&la).unwrap(), "[2,0,-1]");
        let back: Signature = serde_json::from_str("[2,0,-1]").unwrap();
        assert_eq!(back, la);
    }
}
