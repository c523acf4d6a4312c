use super::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> UnitaryMatrix {
    haar_unitary(n, rng).unwrap()
}

#[test]
fn haar_level_one_is_uniform_phase() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let n = 100_000;
    let mut sum = c(0.0, 0.0);
    for _ in 0..n {
        sum += haar_unitary(1, &mut rng).unwrap().matrix()[(0, 0)];
    }
    let mean = sum / n as f64;
    // Var(Re u) = 1/2: three sigma of the mean
    let gate = 3.0 * (0.5 / n as f64).sqrt();
    assert!(mean.re.abs() < gate && mean.im.abs() < gate, "mean {mean}");
}

#[test]
fn haar_output_is_unitary() {
    let mut rng = ChaCha8Rng::seed_from_u64(52);
    for &n in &[1usize, 2, 5, 16, 48] {
        let u = haar_unitary(n, &mut rng).unwrap();
        assert!(
            u.matrix().unitarity_residual() < 1e-12,
            "residual at N = {n}"
        );
    }
}

#[test]
fn haar_first_entry_second_moment() {
    let mut rng = ChaCha8Rng::seed_from_u64(53);
    let n_mat = 4usize;
    let n = 20_000;
    let mut acc = 0.0;
    for _ in 0..n {
        acc += haar_unitary(n_mat, &mut rng).unwrap().matrix()[(0, 0)].norm_sqr();
    }
    let mean = acc / n as f64;
    // |U_11|^2 ~ Beta(1, N-1): variance (N-1)/(N^2 (N+1))
    let var = (n_mat as f64 - 1.0) / ((n_mat * n_mat) as f64 * (n_mat as f64 + 1.0));
    let gate = 3.0 * (var / n as f64).sqrt();
    assert!(
        (mean - 1.0 / n_mat as f64).abs() < gate,
        "E|U11|^2 = {mean}"
    );
}

#[test]
fn haar_eigenangle_marginal_is_uniform() {
    // pooled eigenvalue angles of Haar matrices; the one-point marginal is
    // uniform on [-pi, pi) (within-matrix repulsion only tightens the
    // empirical CDF, so the KS gate is conservative)
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    let n_mat = 4usize;
    let draws = 10_000;
    let mut angles = Vec::with_capacity(n_mat * draws);
    for _ in 0..draws {
        let u = haar_unitary(n_mat, &mut rng).unwrap();
        for e in u.eigenvalues().unwrap() {
            angles.push(e.arg());
        }
    }
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let p = crate::numerics::stats::ks_test(&angles, |t| {
        (t + std::f64::consts::PI) / (2.0 * std::f64::consts::PI)
    })
    .unwrap();
    assert!(p > 0.001, "eigenangle KS p = {p}");
}

#[test]
fn projection_of_block_diagonal() {
    let mut rng = ChaCha8Rng::seed_from_u64(54);
    let v = random_unitary(3, &mut rng);
    let u = v.embed_at(4).unwrap();
    let p = canonical_projection(&u).unwrap();
    assert!(p.matrix().sub(v.matrix()).norm_max() < 1e-12);
}

#[test]
fn projection_of_rotation_matrix() {
    // 2x2 rotation: projects to 1 away from the exceptional angle, to -1 at it
    for phi in [0.3f64, 1.2, 2.9] {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = c(phi.cos(), 0.0);
        m[(0, 1)] = c(phi.sin(), 0.0);
        m[(1, 0)] = c(-phi.sin(), 0.0);
        m[(1, 1)] = c(phi.cos(), 0.0);
        let u = UnitaryMatrix::new(m).unwrap();
        let p = canonical_projection(&u).unwrap();
        assert!(
            (p.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-12,
            "phi = {phi}"
        );
    }
    let mut m = CMatrix::zeros(2, 2);
    m[(0, 0)] = c(-1.0, 0.0);
    m[(1, 1)] = c(-1.0, 0.0);
    let u = UnitaryMatrix::new(m).unwrap();
    let p = canonical_projection(&u).unwrap();
    assert!((p.matrix()[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn projection_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for _ in 0..10 {
        let u = random_unitary(5, &mut rng);
        let g = GroupPair::new(random_unitary(4, &mut rng), random_unitary(4, &mut rng)).unwrap();
        let lhs = canonical_projection(&g.apply(&u).unwrap()).unwrap();
        let rhs = g
            .right
            .adjoint()
            .mul(&canonical_projection(&u).unwrap())
            .mul(&g.left);
        assert!(lhs.matrix().sub(rhs.matrix()).norm_max() < 1e-10);
    }
}

#[test]
fn projection_preserves_exceptional_complement() {
    let mut rng = ChaCha8Rng::seed_from_u64(56);
    for _ in 0..20 {
        let u = random_unitary(5, &mut rng);
        if u.min_dist_to_minus_one().unwrap() < 1e-6 {
            continue;
        }
        let p = canonical_projection(&u).unwrap();
        assert!(p.min_dist_to_minus_one().unwrap() > EXCEPTIONAL_TOL);
    }
}

#[test]
fn corner_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(57);
    for _ in 0..10 {
        let u = random_unitary(4, &mut rng);
        let (iterated, d) = corner_projection(&u, 2).unwrap();
        let oneshot = corner_projection_oneshot(&u, 2).unwrap();
        assert!(iterated.matrix().sub(oneshot.matrix()).norm_max() < 1e-9);
        assert!(d.sub(&u.matrix().block(2, 2, 2, 2)).norm_max() < 1e-15);

        // the characteristic function at -1 reproduces the corner projection
        let phi = characteristic_function(&u, 2, c(-1.0, 0.0)).unwrap();
        assert!(phi.sub(iterated.matrix()).norm_max() < 1e-9);
    }
}

#[test]
fn corner_single_step_matches_canonical() {
    let mut rng = ChaCha8Rng::seed_from_u64(58);
    let u = random_unitary(4, &mut rng);
    let (p, d) = corner_projection(&u, 3).unwrap();
    let q = canonical_projection(&u).unwrap();
    assert!(p.matrix().sub(q.matrix()).norm_max() < 1e-13);
    assert_eq!(d.n_rows, 1);
    assert_eq!(d[(0, 0)], u.matrix()[(3, 3)]);
}

#[test]
fn cayley_scalar_values() {
    let u = UnitaryMatrix::new(CMatrix::identity(1)).unwrap();
    let x = cayley(&u).unwrap();
    assert!(x.matrix()[(0, 0)].norm() < 1e-15);

    let mut m = CMatrix::zeros(1, 1);
    m[(0, 0)] = c(0.0, 1.0);
    let u = UnitaryMatrix::new(m).unwrap();
    let x = cayley(&u).unwrap();
    assert!((x.matrix()[(0, 0)] - c(1.0, 0.0)).norm() < 1e-14);
}

#[test]
fn cayley_roundtrip_and_diagram() {
    let mut rng = ChaCha8Rng::seed_from_u64(59);
    for _ in 0..10 {
        let u = random_unitary(4, &mut rng);
        let x = cayley(&u).unwrap();
        let back = cayley_inverse(&x).unwrap();
        assert!(
            back.matrix().sub(u.matrix()).norm_max() < 1e-10,
            "roundtrip"
        );

        // cayley then delete-last equals project then cayley
        let lhs = cayley(&canonical_projection(&u).unwrap()).unwrap();
        let rhs = x.delete_last().unwrap();
        assert!(lhs.matrix().sub(rhs.matrix()).norm_max() < 1e-9, "diagram");
    }
}

#[test]
fn cayley_near_singular_errors() {
    let mut m = CMatrix::identity(2);
    m[(1, 1)] = c(-1.0, 0.0);
    let u = UnitaryMatrix::new(m).unwrap();
    assert!(matches!(cayley(&u), Err(Error::Singular(_))));
}

#[test]
fn f_zw_basic_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(60);
    let u = random_unitary(3, &mut rng);
    assert!((f_zw(&u, c(0.0, 0.0), c(0.0, 0.0)).unwrap() - c(1.0, 0.0)).norm() < 1e-12);

    let z = c(0.7, 0.2);
    let w = c(0.4, -0.3);
    let id = UnitaryMatrix::identity(4);
    let want = (4.0 * (z + w) * 2.0f64.ln()).exp();
    assert!((f_zw(&id, z, w).unwrap() - want).norm() < 1e-12 * want.norm());

    // matrices with eigenvalue -1 give exactly zero
    let mut m = CMatrix::identity(2);
    m[(0, 0)] = c(-1.0, 0.0);
    let u = UnitaryMatrix::new(m).unwrap();
    assert_eq!(f_zw(&u, z, w).unwrap(), c(0.0, 0.0));
}

#[test]
fn f_zw_projection_factorization() {
    // f_{z,w|N}(U) = f_{z,w|N-1}(p_N U) (1+D)^z (1+conj D)^w
    let mut rng = ChaCha8Rng::seed_from_u64(61);
    let z = c(0.35, 0.45);
    let w = c(0.6, -0.2);
    for _ in 0..10 {
        let u = random_unitary(4, &mut rng);
        let d = u.matrix()[(3, 3)];
        if (d + 1.0).norm() < 1e-6 {
            continue;
        }
        let lhs = f_zw(&u, z, w).unwrap();
        let proj = canonical_projection(&u).unwrap();
        let rhs = f_zw(&proj, z, w).unwrap()
            * (z * (d + 1.0).ln()).exp()
            * (w * (d.conj() + 1.0).ln()).exp();
        assert!(
            (lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1e-12),
            "factorization: {lhs} vs {rhs}"
        );
    }
}

#[test]
fn cocycle_trivial_on_diagonal_subgroup() {
    let mut rng = ChaCha8Rng::seed_from_u64(62);
    let z = c(0.5, 0.3);
    let w = c(0.25, -0.15);
    for _ in 0..10 {
        let u = random_unitary(5, &mut rng);
        let g = GroupPair::diagonal(random_unitary(3, &mut rng));
        let cval = cocycle(&u, &g, z, w).unwrap();
        assert!(
            (cval - c(1.0, 0.0)).norm() < 1e-10,
            "|C - 1| = {}",
            (cval - c(1.0, 0.0)).norm()
        );
    }
}

#[test]
fn cocycle_multiplier_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(63);
    let z = c(0.5, 0.3);
    let w = c(0.25, -0.15);
    for _ in 0..10 {
        let u = random_unitary(5, &mut rng);
        let g1 = GroupPair::new(random_unitary(3, &mut rng), random_unitary(3, &mut rng)).unwrap();
        let g2 = GroupPair::new(random_unitary(3, &mut rng), random_unitary(3, &mut rng)).unwrap();
        let lhs =
            cocycle(&u, &g1, z, w).unwrap() * cocycle(&g1.apply(&u).unwrap(), &g2, z, w).unwrap();
        let rhs = cocycle(&u, &g1.compose(&g2).unwrap(), z, w).unwrap();
        assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
    }
}

#[test]
fn cocycle_stable_across_levels() {
    let mut rng = ChaCha8Rng::seed_from_u64(64);
    let z = c(0.5, 0.3);
    let w = c(0.25, -0.15);
    for _ in 0..10 {
        let u = random_unitary(5, &mut rng);
        let g = GroupPair::new(random_unitary(3, &mut rng), random_unitary(3, &mut rng)).unwrap();
        let at_level_5 = cocycle(&u, &g, z, w).unwrap();
        let projected = canonical_projection(&u).unwrap();
        let at_level_4 = cocycle(&projected, &g, z, w).unwrap();
        assert!(
            (at_level_5 - at_level_4).norm() <= 1e-9 * at_level_4.norm().max(1.0),
            "{at_level_5} vs {at_level_4}"
        );
    }
}

// ---------------------------------------------------------------------------
// Hua-Pickrell densities and normalizers
// ---------------------------------------------------------------------------

#[test]
fn hua_pickrell_zero_parameter_is_haar() {
    let mut rng = ChaCha8Rng::seed_from_u64(65);
    let u = random_unitary(3, &mut rng);
    let d = hua_pickrell_logdensity_unitary(&u, c(0.0, 0.0)).unwrap();
    assert!(d.log_weight.abs() < 1e-10);
    assert!(d.log_normalizer.abs() < 1e-12);
}

#[test]
fn hua_pickrell_normalizer_level_one_quadrature() {
    // (1/2pi) int |1+e^{i t}|^{2 Re s} e^{-2 Im s arg(1+e^{it})} dt
    for s in [c(0.5, 0.0), c(0.3, 0.4), c(1.25, -0.6)] {
        let want = hua_pickrell_log_normalizer(1, s).unwrap();
        let n = 1 << 16;
        let mut acc = 0.0;
        for j in 0..n {
            let theta =
                -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            let base = c(1.0 + theta.cos(), theta.sin());
            if base.norm() < 1e-14 {
                continue;
            }
            acc += (2.0 * (s * base.ln()).re).exp();
        }
        let got = (acc / n as f64).ln();
        assert!(
            (got - want).abs() < 1e-6,
            "s = {s}: quadrature {got} vs formula {want}"
        );
    }
}

#[test]
fn hua_pickrell_hermitian_level_one_quadrature() {
    // int (1-ix)^{-s} (1+ix)^{-conj s} (1+x^2)^{-1} dx via tangent nodes
    for s in [c(0.5, 0.0), c(0.3, 0.4)] {
        let x1 = HermitianMatrix::new(CMatrix::identity(1)).unwrap();
        let want = hua_pickrell_logdensity_hermitian(&x1, s)
            .unwrap()
            .log_normalizer;
        let n = 200_000;
        let mut acc = 0.0;
        for j in 0..n {
            let alpha =
                -std::f64::consts::FRAC_PI_2 + std::f64::consts::PI * (j as f64 + 0.5) / n as f64;
            let x = alpha.tan();
            let jac = 1.0 / alpha.cos().powi(2);
            let base = c(1.0, -x);
            let h = (2.0 * (-s * base.ln()).re).exp() / (1.0 + x * x);
            acc += h * jac;
        }
        let got = (acc * std::f64::consts::PI / n as f64).ln();
        assert!(
            (got - want).abs() < 1e-6,
            "s = {s}: quadrature {got} vs formula {want}"
        );
    }
}

#[test]
fn hua_pickrell_hermitian_level_two_monte_carlo() {
    // Validate the level-2 Lebesgue normalizer against an importance
    // estimate with independent Cauchy proposals in the four real
    // coordinates (a, b, Re c, Im c); the proposal tails match the density.
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    for s in [c(0.5, 0.0), c(0.4, 0.2)] {
        let x1 = HermitianMatrix::new(CMatrix::identity(2)).unwrap();
        let log_z = hua_pickrell_logdensity_hermitian(&x1, s)
            .unwrap()
            .log_normalizer;
        let n = 400_000;
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            let draw =
                |rng: &mut ChaCha8Rng| (std::f64::consts::PI * (rng.random::<f64>() - 0.5)).tan();
            let (a, b, cr, ci) = (
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
                draw(&mut rng),
            );
            // eigenvalues of [[a, cr+i ci],[cr-i ci, b]]
            let mid = (a + b) / 2.0;
            let rad = (((a - b) / 2.0).powi(2) + cr * cr + ci * ci).sqrt();
            let mut h = 0.0f64;
            for t in [mid + rad, mid - rad] {
                h += 2.0 * (-s * c(1.0, -t).ln()).re - 2.0 * (1.0 + t * t).ln();
            }
            // subtract the log proposal density: product of standard Cauchys
            let mut logq = 0.0;
            for x in [a, b, cr, ci] {
                logq += -(std::f64::consts::PI * (1.0 + x * x)).ln();
            }
            vals.push((h - logq).exp());
        }
        let (mean, var) = crate::numerics::stats::mean_var(&vals);
        let got = mean.ln();
        let sigma = (var / n as f64).sqrt() / mean;
        assert!(
            (got - log_z).abs() < 3.0 * sigma + 1e-4,
            "s = {s}: MC {got} +- {sigma} vs formula {log_z}"
        );
    }
}

#[test]
fn hua_pickrell_real_s_density_simplifies() {
    // real s: hermitian weight reduces to det(1+X^2)^{-s-N}
    let mut rng = ChaCha8Rng::seed_from_u64(67);
    let g = CMatrix::from_fn(3, 3, |_, _| {
        c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    let x = HermitianMatrix::new(g).unwrap();
    let s = 0.7f64;
    let lw = hua_pickrell_logdensity_hermitian(&x, c(s, 0.0))
        .unwrap()
        .log_weight;
    let want: f64 = x
        .eigenvalues()
        .unwrap()
        .iter()
        .map(|t| -(s + 3.0) * (1.0 + t * t).ln())
        .sum();
    assert!((lw - want).abs() < 1e-10, "{lw} vs {want}");
}

#[test]
fn hua_pickrell_domain_errors() {
    assert!(hua_pickrell_log_normalizer(2, c(-0.6, 0.0)).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(68);
    assert!(
        sample_hua_pickrell(2, c(-0.7, 0.0), 10, HuaPickrellMode::Importance, &mut rng).is_err()
    );
}

#[test]
fn hua_pickrell_sampling_zero_parameter() {
    let mut rng = ChaCha8Rng::seed_from_u64(69);
    let out =
        sample_hua_pickrell(2, c(0.0, 0.0), 50, HuaPickrellMode::Importance, &mut rng).unwrap();
    for (_, w) in &out.samples {
        assert!((w - 1.0 / 50.0).abs() < 1e-12);
    }
    assert!((out.ess - 50.0).abs() < 1e-9);
}

#[test]
fn hua_pickrell_importance_matches_quadrature_mean() {
    // E[Tr U] under the level-1 measure, via circle quadrature
    let s = c(0.8, 0.0);
    let n_quad = 1 << 15;
    let mut num = c(0.0, 0.0);
    let mut den = 0.0;
    for j in 0..n_quad {
        let theta =
            -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (j as f64 + 0.5) / n_quad as f64;
        let u = c(theta.cos(), theta.sin());
        let wgt = (2.0 * (s * (u + 1.0).ln()).re).exp();
        num += wgt * u;
        den += wgt;
    }
    let want = num / den;

    let mut rng = ChaCha8Rng::seed_from_u64(70);
    let count = 40_000;
    let out = sample_hua_pickrell(1, s, count, HuaPickrellMode::Importance, &mut rng).unwrap();
    let mut mean = c(0.0, 0.0);
    for (u, w) in &out.samples {
        mean += *w * u.matrix().trace();
    }
    // crude 3-sigma gate from the weighted spread
    let mut var = 0.0;
    for (u, w) in &out.samples {
        var += w * (u.matrix().trace() - mean).norm_sqr();
    }
    let sigma = (var / out.ess).sqrt();
    assert!(
        (mean - want).norm() < 3.0 * sigma.max(1e-4),
        "importance mean {mean} vs quadrature {want} (sigma {sigma})"
    );
}

#[test]
fn hua_pickrell_metropolis_agrees_with_importance() {
    let s = c(0.5, 0.25);
    let mut rng = ChaCha8Rng::seed_from_u64(71);
    let count = 30_000;
    let a = sample_hua_pickrell(2, s, count, HuaPickrellMode::Importance, &mut rng).unwrap();
    let b = sample_hua_pickrell(
        2,
        s,
        count,
        HuaPickrellMode::IndependenceMetropolis { burn_in: 500 },
        &mut rng,
    )
    .unwrap();
    assert!(b.acceptance.unwrap() > 0.1, "chain too sticky");
    let f = |u: &UnitaryMatrix| u.matrix().trace().re;
    let mean_a: f64 = a.samples.iter().map(|(u, w)| w * f(u)).sum();
    let mean_b: f64 = b.samples.iter().map(|(u, w)| w * f(u)).sum();
    assert!((mean_a - mean_b).abs() < 0.05, "{mean_a} vs {mean_b}");
}

#[test]
fn hua_pickrell_projection_consistency() {
    // pushing the level-3 measure down one level matches direct level-2
    // sampling, within Monte Carlo error
    let s = c(0.6, -0.3);
    let mut rng = ChaCha8Rng::seed_from_u64(72);
    let count = 30_000;
    let upper = sample_hua_pickrell(3, s, count, HuaPickrellMode::Importance, &mut rng).unwrap();
    let lower = sample_hua_pickrell(2, s, count, HuaPickrellMode::Importance, &mut rng).unwrap();
    let f = |u: &UnitaryMatrix| u.matrix().trace().re;
    let mut mean_pushed = 0.0;
    for (u, w) in &upper.samples {
        mean_pushed += w * f(&canonical_projection(u).unwrap());
    }
    let mean_direct: f64 = lower.samples.iter().map(|(u, w)| w * f(u)).sum();
    // pooled deviation gate, conservative
    let spread = |set: &HuaPickrellSamples, m: f64, g: &dyn Fn(&UnitaryMatrix) -> f64| {
        let mut v = 0.0;
        for (u, w) in &set.samples {
            v += w * (g(u) - m).powi(2);
        }
        (v / set.ess).sqrt()
    };
    let sa = spread(&upper, mean_pushed, &|u| {
        f(&canonical_projection(u).unwrap())
    });
    let sb = spread(&lower, mean_direct, &f);
    let gate = 3.0 * (sa * sa + sb * sb).sqrt();
    assert!(
        (mean_pushed - mean_direct).abs() < gate,
        "pushed {mean_pushed} vs direct {mean_direct} (gate {gate})"
    );
}

#[test]
fn norm_identity_monte_carlo_smoke() {
    // E_Haar |f_{z,w|N}|^2 against the closed form, small version
    let mut rng = ChaCha8Rng::seed_from_u64(73);
    let z = c(0.5, 0.0);
    let w = c(0.0, 0.0);
    let n_mat = 3usize;
    let want = crate::zw_measure::zw_norm_squared(n_mat, z, w).unwrap();
    let count = 20_000;
    let mut vals = Vec::with_capacity(count);
    for _ in 0..count {
        let u = haar_unitary(n_mat, &mut rng).unwrap();
        vals.push(f_zw(&u, z, w).unwrap().norm_sqr());
    }
    let (mean, var) = crate::numerics::stats::mean_var(&vals);
    let sigma = (var / count as f64).sqrt();
    assert!(
        (mean - want).abs() < 3.0 * sigma,
        "MC {mean} vs {want} (sigma {sigma})"
    );
}

#[test]
fn projection_and_corner_entry_are_independent() {
    // the joint pushforward splits into a product: test functions of the
    // projection and of the corner entry decorrelate
    let mut rng = ChaCha8Rng::seed_from_u64(76);
    let count = 20_000;
    let mut xs = Vec::with_capacity(count);
    let mut ys = Vec::with_capacity(count);
    for _ in 0..count {
        let u = haar_unitary(4, &mut rng).unwrap();
        xs.push(canonical_projection(&u).unwrap().matrix().trace().re);
        ys.push(u.matrix()[(3, 3)].norm_sqr());
    }
    let (mx, vx) = crate::numerics::stats::mean_var(&xs);
    let (my, vy) = crate::numerics::stats::mean_var(&ys);
    let cov: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum::<f64>()
        / (count as f64 - 1.0);
    let corr = cov / (vx * vy).sqrt();
    // 3 sigma of a zero correlation estimate at this sample size
    assert!(
        corr.abs() < 3.0 / (count as f64).sqrt(),
        "correlation {corr}"
    );
}

#[test]
fn inner_product_at_identity_is_one() {
    // E_Haar f(V * 1) conj(f(V)) / ||f||^2 = 1
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let z = c(0.5, 0.2);
    let w = c(0.3, -0.1);
    let n_mat = 3usize;
    let norm2 = crate::zw_measure::zw_norm_squared(n_mat, z, w).unwrap();
    let count = 20_000;
    let mut vals = Vec::with_capacity(count);
    for _ in 0..count {
        let v = haar_unitary(n_mat, &mut rng).unwrap();
        vals.push(f_zw(&v, z, w).unwrap().norm_sqr() / norm2);
    }
    let (mean, var) = crate::numerics::stats::mean_var(&vals);
    let sigma = (var / count as f64).sqrt();
    assert!(
        (mean - 1.0).abs() < 3.0 * sigma,
        "mean {mean} (sigma {sigma})"
    );
}

// ---------------------------------------------------------------------------
// Wire formats
// ---------------------------------------------------------------------------

#[test]
fn matrix_json_roundtrip() {
    let mut rng = ChaCha8Rng::seed_from_u64(74);
    let u = random_unitary(3, &mut rng);
    let v = matrix_to_json(u.matrix());
    let back = matrix_from_json(&v).unwrap();
    assert_eq!(&back, u.matrix());
}

#[test]
fn matrix_binary_roundtrip_and_layout() {
    let mut rng = ChaCha8Rng::seed_from_u64(75);
    let u = random_unitary(4, &mut rng);
    let mut buf = Vec::new();
    write_matrix_binary(&mut buf, u.matrix()).unwrap();
    assert_eq!(&buf[0..4], b"GTRM");
    assert_eq!(u32::from_le_bytes(buf[4..8].try_into().unwrap()), 4);
    assert_eq!(buf.len(), 8 + 2 * 16 * 8);
    let back = read_matrix_binary(&mut buf.as_slice()).unwrap();
    assert_eq!(&back, u.matrix());
}
