use super::*;
use crate::gt_graph::verify_coherency;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn sig(e: &[i64]) -> Signature {
    Signature::new(e.to_vec()).unwrap()
}

#[test]
fn classify_examples() {
    assert_eq!(classify(c(0.3, 0.2), c(0.3, -0.2)), SeriesClass::Principal);
    assert_eq!(
        classify(c(0.2, 0.0), c(0.7, 0.0)),
        SeriesClass::Complementary { m: 0 }
    );
    assert_eq!(
        classify(c(0.0, 0.0), c(0.5, 0.0)),
        SeriesClass::Degenerate { m: 0 }
    );
    // both integral: smaller integer drives the support bound
    assert_eq!(
        classify(c(1.0, 0.0), c(0.0, 0.0)),
        SeriesClass::Degenerate { m: 0 }
    );
    assert_eq!(
        classify(c(2.0, 0.0), c(2.0, 0.0)),
        SeriesClass::Degenerate { m: 2 }
    );
    // misaligned real pair and non-conjugate complex pair fall outside
    assert_eq!(classify(c(0.5, 0.0), c(1.5, 0.0)), SeriesClass::Outside);
    assert_eq!(classify(c(0.3, 0.2), c(0.4, -0.2)), SeriesClass::Outside);
    assert_eq!(classify(c(0.0, 0.0), c(-1.5, 0.0)), SeriesClass::Outside);
    assert_eq!(
        classify(c(-0.5, 0.0), c(-0.1, 0.0)),
        SeriesClass::Complementary { m: -1 }
    );
}

#[test]
fn admissibility_examples() {
    let p = ZwParams::principal(c(0.3, 0.2), c(0.1, 0.5));
    assert!(p.is_admissible());

    let p = ZwParams::from_reals(0.0, 0.5, 0.0, 0.5);
    assert!(!p.is_admissible());
    assert!(p.admissibility().unwrap_err().contains("k+l = 0"));

    let p = ZwParams::from_reals(0.0, 0.5, 1.0, 1.5);
    assert!(p.is_admissible());

    // domain violation
    let p = ZwParams::from_reals(-0.4, -0.3, -0.2, -0.2);
    assert!(!p.is_admissible());
    assert!(p.admissibility().unwrap_err().contains("-1"));
}

#[test]
fn p_prime_level_one_degenerate() {
    let p = ZwParams::from_reals(0.0, 0.0, 1.0, 1.0);
    // P'((0)) = 1/(G(1)^2 G(2)^2) = 1
    let lw = log_p_prime(&sig(&[0]), &p).unwrap().unwrap();
    assert!(lw.abs() < 1e-14);
    // P'((-1)) = 1/(G(2)^2 G(1)^2) = 1
    let lw = log_p_prime(&sig(&[-1]), &p).unwrap().unwrap();
    assert!(lw.abs() < 1e-14);
    // Gamma pole at z - la + 1 = 0
    assert!(log_p_prime(&sig(&[1]), &p).unwrap().is_none());
}

#[test]
fn s_n_level_one_example() {
    let p = ZwParams::from_reals(0.0, 0.0, 1.0, 1.0);
    // S_1 = Gamma(3)/Gamma(2)^4 = 2
    let ls = log_s_n(1, &p).unwrap();
    assert!((ls - 2.0f64.ln()).abs() < 1e-13);
}

#[test]
fn s_n_all_zero_parameters() {
    // (0,0,0,0): direct product evaluation gives S_N = prod_i Gamma(i)^{-4},
    // and the single supported signature (0,...,0) carries exactly that
    // weight, so the measure is the delta at zero.
    let p = ZwParams::from_reals(0.0, 0.0, 0.0, 0.0);
    for n in 1..=4usize {
        let mut direct = 0.0;
        for i in 1..=n {
            direct -= 4.0 * log_gamma(c(i as f64, 0.0)).unwrap().log_modulus;
        }
        let ls = log_s_n(n, &p).unwrap();
        assert!((ls - direct).abs() < 1e-12, "S_{n}: {ls} vs {direct}");
        let lw = log_p_prime(&Signature::zero(n), &p).unwrap().unwrap();
        assert!((lw - ls).abs() < 1e-12, "P'(0) vs S at N = {n}");
    }
}

#[test]
fn s_n_matches_truncated_sum_principal() {
    // truncated-sum oracle at N = 2
    let p = ZwParams::principal(c(0.4, 0.6), c(1.1, -0.3));
    let ls = log_s_n(2, &p).unwrap();
    let mut logs = Vec::new();
    signatures_in_box(2, SupportBox::new(-60, 60).unwrap(), |la| {
        if let Some(lw) = log_p_prime(la, &p).unwrap() {
            logs.push(lw);
        }
    });
    let lsum = log_sum_exp(&logs).unwrap();
    assert!(
        ((lsum - ls).exp() - 1.0).abs() < 1e-6,
        "sum {lsum} vs S_2 {ls}, ratio {}",
        (lsum - ls).exp()
    );
}

#[test]
fn table_level_one_degenerate() {
    let p = ZwParams::from_reals(0.0, 0.0, 1.0, 1.0);
    let t = build_table(1, &p, 1e-8).unwrap();
    assert_eq!(t.masses.len(), 2);
    assert!((t.probability(&sig(&[0])) - 0.5).abs() < 1e-14);
    assert!((t.probability(&sig(&[-1])) - 0.5).abs() < 1e-14);
    assert!(t.defect() < 1e-12);
}

#[test]
fn table_respects_degenerate_support() {
    // z-pair degenerate(0), w-pair degenerate(1): 0 >= la_1, la_N >= -1
    let p = ZwParams::from_reals(0.0, 0.5, 1.0, 1.5);
    let t = build_table(2, &p, 1e-8).unwrap();
    for la in t.masses.keys() {
        assert!(
            la.entries()[0] <= 0 && *la.entries().last().unwrap() >= -1,
            "{la}"
        );
    }
    assert_eq!(t.masses.len(), 3); // (0,0), (0,-1), (-1,-1)
    assert!(t.defect() < 1e-12);
}

#[test]
fn table_box_doubling_shrinks_defect() {
    let p = ZwParams::principal(c(0.5, 0.5), c(1.0, 0.25));
    let coarse = build_table(1, &p, 1e-3).unwrap();
    let fine = build_table(1, &p, 1e-9).unwrap();
    assert!(coarse.defect() <= 1e-3);
    assert!(fine.defect() <= 1e-9);
    assert!(fine.defect() < coarse.defect());
    assert!(fine.masses.len() > coarse.masses.len());
}

#[test]
fn table_masses_decay_like_power_law() {
    // tail exponent Re(sigma) + 2 at level 1
    let p = ZwParams::principal(c(0.5, 0.5), c(1.0, 0.25));
    let t = build_table(1, &p, 1e-12).unwrap();
    let expo = p.re_sum() + 2.0;
    for &k in &[64i64, 128, 256] {
        let a = t.masses.get(&sig(&[k])).copied().expect("box covers k");
        let b = t
            .masses
            .get(&sig(&[2 * k]))
            .copied()
            .expect("box covers 2k");
        let ratio = (a - b) / 2.0f64.ln();
        assert!(
            (ratio - expo).abs() < 0.2,
            "tail exponent at {k}: {ratio} vs {expo}"
        );
    }
}

#[test]
fn coherency_up_to_level_four_degenerate() {
    // finite-support tables: residuals stay at float level through N = 4
    let p = ZwParams::from_reals(0.0, 0.0, 1.0, 1.0);
    let tables: Vec<_> = (1..=4)
        .map(|n| build_table(n, &p, 1e-10).unwrap())
        .collect();
    for w in tables.windows(2) {
        let report = verify_coherency(&w[0], &w[1], 1e-12).unwrap();
        assert!(
            report.passes,
            "residual {} at {} -> {}",
            report.max_abs_residual, w[1].level, w[0].level
        );
        assert!(report.max_abs_residual <= 10.0 * w[1].defect() + 1e-13);
    }
}

#[test]
fn coherency_of_zw_tables() {
    let p = ZwParams::principal(c(1.0, 1.0), c(1.5, -0.5));
    let t1 = build_table(1, &p, 1e-9).unwrap();
    let t2 = build_table(2, &p, 1e-9).unwrap();
    let report = verify_coherency(&t1, &t2, 1e-8).unwrap();
    assert!(
        report.max_abs_residual <= 1e-8,
        "residual {}",
        report.max_abs_residual
    );
    assert!(report.passes);
}

#[test]
fn growth_limit_error_surfaces() {
    // Re(sigma) = -0.9 gives a k^{-1.1} tail: the coordinate cap is reached
    // long before the captured mass comes within 1e-12 of S_1.
    let p = ZwParams::principal(c(-0.4, 0.3), c(-0.05, -0.2));
    assert!(p.is_admissible());
    match build_table(1, &p, 1e-12) {
        Err(Error::GrowthLimit { cap, defect }) => {
            assert_eq!(cap, BOX_COORDINATE_CAP);
            assert!(defect > 1e-12);
        }
        other => panic!("expected growth-limit error, got {other:?}"),
    }
}

#[test]
fn non_admissible_rejected_and_diagnostic_mode_works() {
    let p = ZwParams::from_reals(0.5, 1.5, 1.0, 1.0); // (z,z') outside
    assert!(build_table(1, &p, 1e-6).is_err());
    // diagnostic weights are finite reals here; Gamma(1.5 - la) turns
    // negative once la exceeds 1, so the sign must flip
    let v1 = p_prime_complex(&sig(&[1]), &p);
    let v2 = p_prime_complex(&sig(&[2]), &p);
    assert!(v1.is_finite() && v2.is_finite());
    assert!(v1.re * v2.re < 0.0, "no sign change: {v1} vs {v2}");
}

#[test]
fn fourier_level_one_closed_form() {
    let z = c(0.7, 0.4);
    let w = c(0.3, -0.1);
    for l in -4..=4 {
        let got = fourier_coefficient(&sig(&[l]), z, w).unwrap();
        let want = fourier_coefficient_1d(l, z, w).unwrap();
        assert!((got - want).norm() < 1e-12 * want.norm().max(1e-12));
    }
}

#[test]
fn fourier_at_zero_parameters() {
    // f == 1: c(0,...,0) = 1 and all other coefficients vanish
    let z = c(0.0, 0.0);
    let w = c(0.0, 0.0);
    assert!((fourier_coefficient(&Signature::zero(3), z, w).unwrap() - c(1.0, 0.0)).norm() < 1e-13);
    for la in [sig(&[1, 0, 0]), sig(&[0, 0, -1]), sig(&[2, 1, -1])] {
        assert!(
            fourier_coefficient(&la, z, w).unwrap().norm() < 1e-13,
            "{la}"
        );
    }
}

#[test]
fn fourier_det_matches_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..40 {
        let n = rng.random_range(1..=6usize);
        let mut entries: Vec<i64> = (0..n).map(|_| rng.random_range(-10..=10)).collect();
        entries.sort_unstable_by(|a, b| b.cmp(a));
        let la = Signature::new(entries).unwrap();
        let z = c(rng.random_range(-0.2..1.3), rng.random_range(-0.75..0.75));
        let w = c(rng.random_range(-0.2..1.3), rng.random_range(-0.75..0.75));
        let closed = fourier_coefficient(&la, z, w).unwrap();
        let det = fourier_coefficient_det(&la, z, w).unwrap();
        assert!(
            (closed - det).norm() <= 1e-10 * closed.norm().max(1e-12),
            "{la}: {closed} vs {det}"
        );
    }
}

#[test]
fn dougall_finite_support_exact() {
    let p = ZwParams::from_reals(0.0, 0.0, 1.0, 1.0);
    let r = verify_dougall(&p, 0).unwrap();
    assert_eq!(r.terms, 2);
    assert!(r.abs_error < 1e-14, "error {}", r.abs_error);
    assert!((r.rhs.re - 2.0).abs() < 1e-13);
}

#[test]
fn dougall_error_decreases_with_truncation() {
    let p = ZwParams::principal(c(0.4, 0.3), c(0.35, -0.2));
    let e10 = verify_dougall(&p, 10).unwrap().abs_error;
    let e20 = verify_dougall(&p, 20).unwrap().abs_error;
    let e200 = verify_dougall(&p, 200).unwrap().abs_error;
    assert!(e20 < e10, "{e20} !< {e10}");
    assert!(e200 < e20);
    assert!(e200 <= 1e-6, "residual at K=200: {e200}");
}

#[test]
fn krattenthaler_small_cases() {
    // N = 1: empty products on both sides
    let r = verify_krattenthaler(&[5], &[], &[]).unwrap();
    assert!((r.lhs_det - c(1.0, 0.0)).norm() < 1e-15);
    assert!(r.rel_error < 1e-15);

    // N = 2 integer data evaluates exactly
    let r = verify_krattenthaler(&[2, 0], &[c(1.0, 0.0)], &[c(3.0, 0.0)]).unwrap();
    assert!((r.lhs_det - c(-4.0, 0.0)).norm() < 1e-13);
    assert!(r.rel_error < 1e-14);
}

#[test]
fn krattenthaler_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..20 {
        let n = 5usize;
        let mut x: Vec<i64> = Vec::new();
        while x.len() < n {
            let v = rng.random_range(-12..=12);
            if !x.contains(&v) {
                x.push(v);
            }
        }
        let a: Vec<Complex64> = (0..n - 1)
            .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let b: Vec<Complex64> = (0..n - 1)
            .map(|_| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)))
            .collect();
        let r = verify_krattenthaler(&x, &a, &b).unwrap();
        assert!(r.rel_error <= 1e-10, "rel error {}", r.rel_error);
    }
}

#[test]
fn norm_squared_values() {
    for n in 1..=5 {
        assert!((zw_norm_squared(n, c(0.0, 0.0), c(0.0, 0.0)).unwrap() - 1.0).abs() < 1e-14);
    }
    // N=1, z=1, w=0: G(1) G(3) / (G(2) G(2)) = 2
    assert!((zw_norm_squared(1, c(1.0, 0.0), c(0.0, 0.0)).unwrap() - 2.0).abs() < 1e-13);
    assert!(zw_norm_squared(1, c(-0.3, 0.0), c(-0.2, 0.0)).is_err());
}

#[test]
fn parseval_norm_vs_coefficients() {
    // sum over a box of |c(la)|^2 approximates the squared norm
    let z = c(0.4, 0.3);
    let w = c(0.2, -0.1);
    let norm2 = zw_norm_squared(2, z, w).unwrap();
    let mut sum = 0.0;
    signatures_in_box(2, SupportBox::new(-40, 40).unwrap(), |la| {
        sum += fourier_coefficient(la, z, w).unwrap().norm_sqr();
    });
    assert!(
        (sum - norm2).abs() <= 1e-4 * norm2,
        "Parseval defect: sum {sum} vs norm^2 {norm2}"
    );
}

#[test]
fn probability_equals_coefficient_ratio() {
    // P_N(la) = |c(la)|^2 / ||f||^2 for conjugate-pair parameters
    let z = c(0.6, 0.7);
    let w = c(0.9, -0.2);
    let p = ZwParams::principal(z, w);
    for n in 1..=4usize {
        let ls = log_s_n(n, &p).unwrap();
        let norm2 = zw_norm_squared(n, z, w).unwrap();
        let mut checked = 0;
        signatures_in_box(n, SupportBox::new(-3, 3).unwrap(), |la| {
            let prob = (log_p_prime(la, &p).unwrap().unwrap() - ls).exp();
            let ratio = fourier_coefficient(la, z, w).unwrap().norm_sqr() / norm2;
            assert!(
                (prob - ratio).abs() <= 1e-9 * ratio.max(1e-12),
                "P({la}) = {prob} vs |c|^2/norm = {ratio} at N = {n}"
            );
            checked += 1;
        });
        assert!(checked > 0);
    }
}

#[test]
fn positivity_over_test_box() {
    let sets = [
        ZwParams::principal(c(0.3, 0.2), c(0.1, 0.5)),
        ZwParams::from_reals(0.2, 0.7, 0.3, 0.6),
        ZwParams::from_reals(-0.5, -0.1, 1.4, 1.9),
        ZwParams::from_reals(0.0, 0.5, 1.0, 1.5),
    ];
    for p in &sets {
        assert!(p.is_admissible());
        signatures_in_box(2, SupportBox::new(-6, 6).unwrap(), |la| {
            // a weight is either an exact zero or a finite real log
            if let Some(lw) = log_p_prime(la, p).unwrap() {
                assert!(lw.is_finite());
            }
        });
    }
}

#[test]
fn degenerate_support_is_exactly_the_simplex() {
    let p = ZwParams::from_reals(2.0, 2.5, 1.0, 0.8); // k = 2, l = 1
    let (upper, lower) = p.degenerate_bounds();
    assert_eq!((upper, lower), (Some(2), Some(-1)));
    signatures_in_box(3, SupportBox::new(-4, 5).unwrap(), |la| {
        let inside = la.entries()[0] <= 2 && *la.entries().last().unwrap() >= -1;
        let w = log_p_prime(la, &p).unwrap();
        assert_eq!(w.is_some(), inside, "support mismatch at {la}");
    });
}

#[test]
fn symmetry_conjugation_invariance() {
    // swapping z with conj z leaves the weights unchanged (principal case)
    let z = c(0.8, 0.6);
    let w = c(0.4, 0.3);
    let p1 = ZwParams::new(z, z.conj(), w, w.conj());
    let p2 = ZwParams::new(z.conj(), z, w, w.conj());
    let p3 = ZwParams::new(z, z.conj(), w.conj(), w);
    signatures_in_box(3, SupportBox::new(-3, 3).unwrap(), |la| {
        let a = log_p_prime(la, &p1).unwrap().unwrap();
        let b = log_p_prime(la, &p2).unwrap().unwrap();
        let d = log_p_prime(la, &p3).unwrap().unwrap();
        assert!((a - b).abs() < 1e-12 && (a - d).abs() < 1e-12, "at {la}");
    });
}

#[test]
fn symmetry_dual_signature_swap() {
    // P_N(la | z, z', w, w') = P_N(la* | w, w', z, z') as exact log-weights
    let p = ZwParams::new(c(0.8, 0.6), c(0.8, -0.6), c(0.4, 0.3), c(0.4, -0.3));
    let q = ZwParams::new(p.w, p.w_prime, p.z, p.z_prime);
    signatures_in_box(3, SupportBox::new(-3, 3).unwrap(), |la| {
        let a = log_p_prime(la, &p).unwrap().unwrap();
        let b = log_p_prime(&la.dual(), &q).unwrap().unwrap();
        assert!((a - b).abs() < 1e-12, "dual symmetry at {la}: {a} vs {b}");
    });
}

#[test]
fn params_serde_roundtrip_and_shorthand() {
    let p = ZwParams::principal(c(0.3, 0.2), c(1.0, -0.5));
    let json = serde_json::to_string(&p).unwrap();
    let back: ZwParams = serde_json::from_str(&json).unwrap();
    assert_eq!(p, back);

    // principal shorthand expands conjugates
    let short: ZwParams = serde_json::from_str(r#"{"z": [0.3, 0.2], "w": [1.0, -0.5]}"#).unwrap();
    assert_eq!(short, p);

    // bare numbers are real values
    let real: ZwParams =
        serde_json::from_str(r#"{"z": 0.0, "z_prime": 0.5, "w": 1.0, "w_prime": 1.5}"#).unwrap();
    assert_eq!(real, ZwParams::from_reals(0.0, 0.5, 1.0, 1.5));
}

#[test]
fn parse_complex_flag_format() {
    assert_eq!(parse_complex("1.5").unwrap(), c(1.5, 0.0));
    assert_eq!(parse_complex("0.3,0.2").unwrap(), c(0.3, 0.2));
    assert_eq!(parse_complex(" 0.3 , -0.2 ").unwrap(), c(0.3, -0.2));
    assert!(parse_complex("a,b").is_err());
    assert!(parse_complex("1,2,3").is_err());
}
