//! Property suites for the invariants of each module.

use floquet_core::expr::{combine, parse_polynomial, CombineOp, Polynomial, Rational};
use floquet_core::floquet::{
    classify_stability, compare_methods, count_near_one, discover_cofactor, monodromy_variational,
    multipliers_cofactor, verify_invariance, InvariantManifoldSet, DEFAULT_STABILITY_TOL,
};
use floquet_core::numlin::{
    determinant, eigenvalues, solve_exact, ComplexValue, Matrix, RationalMatrix,
};
use floquet_core::ode::{integrate, integrate_matrix, FnField, IntegratorConfig};
use floquet_core::quad;
use floquet_core::specfun::{
    elliptic_f, elliptic_k, jacobi_am, jacobi_derivatives, jacobi_sn_cn_dn,
};
use floquet_core::systems::{
    example1, example1_expected_multipliers, mathieu, sample_steklov_params, steklov,
    Example1Params, MathieuParams,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn vars() -> Vec<String> {
    ["x", "y", "z"].iter().map(|s| s.to_string()).collect()
}

/// Polynomials in x, y, z with small rational coefficients and degree at most 4.
fn polynomial() -> impl Strategy<Value = Polynomial> {
    let term = (prop::collection::vec(0u32..3, 3), -20i64..20, 1i64..6);
    prop::collection::vec(term, 0..6).prop_map(|terms| {
        Polynomial::from_terms(
            &vars(),
            terms
                .into_iter()
                .map(|(e, n, d)| (e, Rational::new(BigInt::from(n), BigInt::from(d)))),
        )
        .unwrap()
    })
}

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

proptest! {
    #[test]
    fn render_then_parse_is_identity(p in polynomial()) {
        let text = p.to_string();
        prop_assert_eq!(parse_polynomial(&text, &vars()).unwrap(), p);
    }

    #[test]
    fn differentiation_is_linear(a in polynomial(), b in polynomial()) {
        for v in vars() {
            let lhs = a.add(&b).unwrap().differentiate(&v).unwrap();
            let rhs = a.differentiate(&v).unwrap().add(&b.differentiate(&v).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn product_evaluates_to_product_of_values(
        a in polynomial(),
        b in polynomial(),
        x in prop::collection::vec(-4i32..5, 3),
    ) {
        // Rounding of both sides is bounded by a few ulps of the sum of
        // absolute term values of the product.
        let point: Vec<f64> = x.iter().map(|&v| v as f64).collect();
        let ab = combine(&a, &b, CombineOp::Mul).unwrap();
        let lhs = ab.evaluate(&point).unwrap();
        let rhs = a.evaluate(&point).unwrap() * b.evaluate(&point).unwrap();
        let mag: f64 = ab.terms().map(|(e, c)| {
            floquet_core::expr::rational_to_f64(c).abs()
                * e.iter().zip(&point).map(|(&k, v)| v.abs().powi(k as i32)).product::<f64>()
        }).sum::<f64>().max(1.0);
        prop_assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * mag * 64.0, "{lhs} vs {rhs}");
    }

    #[test]
    fn elliptic_identities(z in -20.0f64..20.0, k in 0.0f64..0.999) {
        let j = jacobi_sn_cn_dn(z, k).unwrap();
        prop_assert!((j.cn * j.cn + j.sn * j.sn - 1.0).abs() <= 1e-12);
        prop_assert!((j.dn * j.dn + k * k * j.sn * j.sn - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sn_has_period_four_k(z in -5.0f64..5.0, k in 0.0f64..0.99) {
        let big_k = elliptic_k(k).unwrap();
        let a = jacobi_sn_cn_dn(z, k).unwrap();
        let b = jacobi_sn_cn_dn(z + 4.0 * big_k, k).unwrap();
        prop_assert!((a.sn - b.sn).abs() <= 1e-10);
    }

    #[test]
    fn amplitude_inverts_incomplete_integral(frac in 0.0f64..1.0, k in 0.0f64..0.999) {
        let z = frac * 2.0 * elliptic_k(k).unwrap();
        let w = jacobi_am(z, k).unwrap();
        prop_assert!((elliptic_f(w, k).unwrap() - z).abs() <= 1e-11);
    }

    #[test]
    fn complete_integral_is_increasing(k1 in 0.0f64..0.999, k2 in 0.0f64..0.999) {
        let (lo, hi) = if k1 <= k2 { (k1, k2) } else { (k2, k1) };
        prop_assert!(elliptic_k(lo).unwrap() <= elliptic_k(hi).unwrap());
    }

    #[test]
    fn jacobi_derivatives_match_finite_differences(z in -20.0f64..20.0, k in 0.0f64..0.999) {
        let h = 1e-5;
        let d = jacobi_derivatives(z, k).unwrap();
        let up = jacobi_sn_cn_dn(z + h, k).unwrap();
        let dn = jacobi_sn_cn_dn(z - h, k).unwrap();
        prop_assert!(((up.sn - dn.sn) / (2.0 * h) - d.sn).abs() <= 1e-8);
        prop_assert!(((up.cn - dn.cn) / (2.0 * h) - d.cn).abs() <= 1e-8);
        prop_assert!(((up.dn - dn.dn) / (2.0 * h) - d.dn).abs() <= 1e-8);
    }

    #[test]
    fn eigenvalues_reproduce_determinant_and_trace(
        entries in prop::collection::vec(-1.0f64..1.0, 25),
    ) {
        // Diagonally shifted, so the matrix is well conditioned.
        let mut m = Matrix::from_row_major(5, 5, entries);
        for i in 0..5 {
            m.row_mut(i)[i] += 3.0;
        }
        let eig = eigenvalues(&m).unwrap();
        let product = eig.iter().fold(ComplexValue::new(1.0, 0.0), |acc, z| acc * z);
        let det = determinant(&m).unwrap();
        prop_assert!((product.re - det).abs() <= 1e-8 * det.abs());
        prop_assert!(product.im.abs() <= 1e-8 * det.abs());
        let sum: ComplexValue = eig.iter().sum();
        prop_assert!((sum.re - m.trace()).abs() <= 1e-8 * m.norm_inf());
        prop_assert!(sum.im.abs() <= 1e-8 * m.norm_inf());
    }

    #[test]
    fn exact_solution_reproduces_rhs(
        entries in prop::collection::vec(-9i64..10, 16),
        rhs in prop::collection::vec(-9i64..10, 4),
    ) {
        let r = |n: i64| Rational::from_integer(BigInt::from(n));
        let a = RationalMatrix::from_fn(4, 4, |i, j| r(entries[4 * i + j]));
        let b: Vec<Rational> = rhs.iter().map(|&n| r(n)).collect();
        if let Ok(x) = solve_exact(&a, &b) {
            prop_assert_eq!(a.mul_vec(&x), b);
        }
    }

    #[test]
    fn stability_verdict_ignores_order(
        values in prop::collection::vec((0.0f64..2.0, -1.0f64..1.0), 1..6),
        seed in any::<u64>(),
    ) {
        let list: Vec<ComplexValue> = values.iter().map(|&(re, im)| ComplexValue::new(re, im)).collect();
        let mut shuffled = list.clone();
        let n = shuffled.len();
        shuffled.rotate_left((seed % n as u64) as usize);
        shuffled.reverse();
        prop_assert_eq!(
            classify_stability(&list, DEFAULT_STABILITY_TOL),
            classify_stability(&shuffled, DEFAULT_STABILITY_TOL)
        );
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn liouville_identity_for_periodic_linear_systems(
        c in prop::collection::vec(-1.0f64..1.0, 8),
        t1 in 0.5f64..6.0,
    ) {
        let a = |t: f64, m: &mut Matrix| {
            m.row_mut(0).copy_from_slice(&[c[0] + c[1] * t.cos(), c[2]]);
            m.row_mut(1).copy_from_slice(&[c[3] * t.sin(), c[4] + c[5] * (2.0 * t).cos()]);
        };
        let v0 = Matrix::from_rows(&[vec![1.0 + c[6].abs(), c[7]], vec![0.0, 1.0]]);
        let v = integrate_matrix(a, &v0, 0.0, t1, &cfg()).unwrap();
        let tr = quad::integrate(
            |t| c[0] + c[1] * t.cos() + c[4] + c[5] * (2.0 * t).cos(),
            0.0,
            t1,
            1e-14,
            1e-13,
        )
        .unwrap();
        let want = determinant(&v0).unwrap() * tr.exp();
        prop_assert!((determinant(&v).unwrap() / want - 1.0).abs() <= 1e-7);
    }

    #[test]
    fn flow_property(y0 in prop::collection::vec(-1.0f64..1.0, 2), mid in 0.1f64..2.9) {
        let f = FnField::new(2, |t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = y[1];
            dy[1] = -y[0] - 0.1 * y[1] + 0.3 * t.cos();
        });
        let direct = integrate(&f, &y0, 0.0, 3.0, &cfg()).unwrap();
        let half = integrate(&f, &y0, 0.0, mid, &cfg()).unwrap();
        let split = integrate(&f, &half, mid, 3.0, &cfg()).unwrap();
        for (a, b) in direct.iter().zip(&split) {
            prop_assert!((a - b).abs() <= 10.0 * (1e-10 * a.abs() + 1e-12) + 1e-10);
        }
    }

    #[test]
    fn tighter_tolerances_reduce_error(y0 in 0.1f64..2.0, lambda in -2.0f64..0.5) {
        // Error is not monotone in the tolerance for adaptive step control;
        // a tightened run either improves or already meets its own tolerance.
        let f = FnField::new(1, move |_t: f64, y: &[f64], dy: &mut [f64]| dy[0] = lambda * y[0]);
        let exact = y0 * (2.0 * lambda).exp();
        let coarse = IntegratorConfig::with_tolerances(1e-6, 1e-8);
        let fine = IntegratorConfig::with_tolerances(1e-9, 1e-11);
        let e1 = (integrate(&f, &[y0], 0.0, 2.0, &coarse).unwrap()[0] - exact).abs();
        let e2 = (integrate(&f, &[y0], 0.0, 2.0, &fine).unwrap()[0] - exact).abs();
        prop_assert!(e2 <= e1.max(fine.rtol * exact.abs() + fine.atol), "{e2} > {e1}");
    }

    #[test]
    fn builtin_identities_are_exact(s in -3.0f64..3.0, k in -3.0f64..3.0, a in -2.0f64..4.0, q in -2.0f64..2.0) {
        let e1 = example1(Example1Params { s, k_param: k }).unwrap();
        prop_assert!(e1.manifolds.identity_residual(&e1.system).unwrap().iter().all(Polynomial::is_zero));
        let e2 = mathieu(MathieuParams { a, q }).unwrap();
        prop_assert!(e2.manifolds.identity_residual(&e2.system).unwrap().iter().all(Polynomial::is_zero));
    }

    #[test]
    fn discovered_cofactors_verify(a in -2.0f64..4.0, q in -2.0f64..2.0) {
        let prob = mathieu(MathieuParams { a, q }).unwrap();
        let k = discover_cofactor(&prob.system, prob.manifolds.functions(), 2).unwrap();
        let found = InvariantManifoldSet::new(prob.manifolds.functions().to_vec(), k).unwrap();
        let inv = verify_invariance(&prob.system, &found, prob.orbit.as_ref(), 32).unwrap();
        prop_assert_eq!(inv.symbolic, Some(true));
    }
}

/// Variational monodromy has an eigenvalue within 1e-5 of 1 for every
/// builtin and 20 parameter draws of each parametrized builtin.
#[test]
fn variational_spectrum_contains_one() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let mut problems = vec![floquet_core::systems::circle().unwrap()];
    for _ in 0..20 {
        let s = rng.gen_range(-1.0..1.0);
        let k = rng.gen_range(-1.0..2.0);
        problems.push(example1(Example1Params { s, k_param: k }).unwrap());
        let a = rng.gen_range(0.0..4.0);
        let q = rng.gen_range(-1.0..1.0);
        problems.push(mathieu(MathieuParams { a, q }).unwrap());
    }
    for p in sample_steklov_params(20, 9) {
        problems.push(steklov(p).unwrap());
    }
    for prob in &problems {
        let u = monodromy_variational(&prob.system, prob.orbit.as_ref(), &cfg()).unwrap();
        let eig = eigenvalues(&u).unwrap();
        assert!(count_near_one(&eig, 1e-5) >= 1, "{}: {eig:?}", prob.name);
    }
}

#[test]
fn methods_agree_on_all_builtins() {
    for name in floquet_core::systems::BUILTIN_NAMES {
        let prob = floquet_core::systems::builtin(name, &[]).unwrap();
        let cmp =
            compare_methods(&prob.system, &prob.manifolds, prob.orbit.as_ref(), &cfg()).unwrap();
        assert!(
            cmp.max_relative_distance <= 1e-4,
            "{name}: {}",
            cmp.max_relative_distance
        );
    }
}

#[test]
fn example1_grid_matches_closed_form() {
    // Multipliers reach 1e-22; a pure relative tolerance keeps them resolved.
    let cfg = IntegratorConfig::with_tolerances(1e-10, 1e-30);
    let grid: Vec<f64> = (0..5).map(|i| -2.0 + i as f64).collect();
    for &s in &grid {
        for &k in &grid {
            let p = Example1Params { s, k_param: k };
            if p.branch_rate().abs() < 0.05 {
                continue;
            }
            let prob = example1(p).unwrap();
            let report =
                multipliers_cofactor(&prob.system, &prob.manifolds, prob.orbit.as_ref(), &cfg)
                    .unwrap();
            let mut got: Vec<f64> = report.multipliers.iter().map(|z| z.re).collect();
            let mut want = example1_expected_multipliers(p).values.to_vec();
            got.sort_by(f64::total_cmp);
            want.sort_by(f64::total_cmp);
            for (g, w) in got.iter().zip(&want) {
                assert!(
                    (g / w - 1.0).abs() <= 1e-6,
                    "(s, k) = ({s}, {k}): {got:?} vs {want:?}"
                );
            }
        }
    }
}

#[test]
fn steklov_cofactor_determinant_is_one() {
    for p in sample_steklov_params(5, 3) {
        let prob = steklov(p).unwrap();
        let report =
            multipliers_cofactor(&prob.system, &prob.manifolds, prob.orbit.as_ref(), &cfg())
                .unwrap();
        let det = determinant(report.monodromy.as_ref().unwrap()).unwrap();
        assert!((det - 1.0).abs() <= 1e-6, "{p:?}: {det}");
    }
}
