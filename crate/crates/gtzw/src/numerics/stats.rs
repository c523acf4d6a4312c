//! Survival functions for the statistical acceptance gates.

use crate::{Error, Result};

/// log Gamma for positive real argument, borrowed from the complex path.
fn ln_gamma(x: f64) -> f64 {
    super::log_gamma(num_complex::Complex64::new(x, 0.0))
        .expect("positive argument")
        .log_modulus
}

/// Regularized lower incomplete gamma P(a, x), series branch.
fn gamma_p_series(a: f64, x: f64) -> f64 {
    let mut ap = a;
    let mut sum = 1.0 / a;
    let mut del = sum;
    for _ in 0..500 {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if del.abs() < sum.abs() * 1e-16 {
            break;
        }
    }
    sum * (-x + a * x.ln() - ln_gamma(a)).exp()
}

/// Regularized upper incomplete gamma Q(a, x), continued-fraction branch.
fn gamma_q_cf(a: f64, x: f64) -> f64 {
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..500 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln() - ln_gamma(a)).exp() * h
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
pub fn gamma_q(a: f64, x: f64) -> Result<f64> {
    if a <= 0.0 || x < 0.0 {
        return Err(Error::Domain(format!("gamma_q(a={a}, x={x})")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x < a + 1.0 {
        Ok(1.0 - gamma_p_series(a, x))
    } else {
        Ok(gamma_q_cf(a, x))
    }
}

/// Chi-square survival function with `k` degrees of freedom.
pub fn chi_square_sf(x: f64, k: usize) -> Result<f64> {
    gamma_q(k as f64 / 2.0, x / 2.0)
}

/// Pearson chi-square statistic of observed counts against expected counts.
/// Degrees of freedom are `cells - 1`.
pub fn chi_square_stat(observed: &[u64], expected: &[f64]) -> Result<(f64, usize)> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::Empty(
            "chi_square_stat needs matching nonempty slices",
        ));
    }
    let mut stat = 0.0;
    for (&o, &e) in observed.iter().zip(expected) {
        if e <= 0.0 {
            return Err(Error::Domain("expected count must be positive".into()));
        }
        let d = o as f64 - e;
        stat += d * d / e;
    }
    Ok((stat, observed.len() - 1))
}

/// Chi-square goodness-of-fit p-value of counts against cell probabilities.
pub fn chi_square_test(observed: &[u64], probs: &[f64]) -> Result<f64> {
    let n: u64 = observed.iter().sum();
    let expected: Vec<f64> = probs.iter().map(|p| p * n as f64).collect();
    let (stat, dof) = chi_square_stat(observed, &expected)?;
    chi_square_sf(stat, dof)
}

/// Two-sample chi-square homogeneity test over shared cells.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> Result<f64> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::Empty(
            "two-sample test needs matching nonempty slices",
        ));
    }
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    if na == 0 || nb == 0 {
        return Err(Error::Empty("two-sample test needs nonzero totals"));
    }
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&oa, &ob) in a.iter().zip(b) {
        let tot = (oa + ob) as f64;
        if tot == 0.0 {
            continue;
        }
        let ea = tot * na as f64 / (na + nb) as f64;
        let eb = tot * nb as f64 / (na + nb) as f64;
        stat += (oa as f64 - ea).powi(2) / ea + (ob as f64 - eb).powi(2) / eb;
        cells += 1;
    }
    if cells < 2 {
        return Err(Error::Domain(
            "two-sample test needs at least two occupied cells".into(),
        ));
    }
    chi_square_sf(stat, cells - 1)
}

/// Asymptotic Kolmogorov survival function Q_KS(lambda).
pub fn ks_sf(lambda: f64) -> f64 {
    if lambda < 1e-8 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let t = (-2.0 * (j as f64) * (j as f64) * lambda * lambda).exp();
        sum += sign * t;
        sign = -sign;
        if t < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov-Smirnov p-value of sorted data against a CDF.
pub fn ks_test<F: Fn(f64) -> f64>(data_sorted: &[f64], cdf: F) -> Result<f64> {
    let n = data_sorted.len();
    if n == 0 {
        return Err(Error::Empty("ks_test needs data"));
    }
    let nf = n as f64;
    let mut d = 0.0f64;
    for (i, &x) in data_sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / nf).abs());
        d = d.max(((i + 1) as f64 / nf - f).abs());
    }
    let lambda = (nf.sqrt() + 0.12 + 0.11 / nf.sqrt()) * d;
    Ok(ks_sf(lambda))
}

/// Sample mean and (unbiased) variance.
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
