use proptest::prelude::*;

use nullmem::quadrature::{linspace, CumulativeRule, DerivativeRule};
use nullmem::sphere::{
    analyze, analyze_oneform, curl_oneform, decompose_stt, divergence_oneform, divergence_stt, gradient,
    invert_div_stt, laplacian, recompose_stt, solve_poisson, synthesize, synthesize_oneform, OneFormField,
    ShCoefficients, SphereGrid, SttField,
};

const L: usize = 8;

fn coeffs(l_min: usize) -> impl Strategy<Value = ShCoefficients> {
    prop::collection::vec(-1.0f64..1.0, (L + 1) * (L + 1)).prop_map(move |v| {
        let mut c = ShCoefficients::zeros(L);
        for l in l_min..=L {
            for m in -(l as i64)..=l as i64 {
                c.set(l, m, v[l * l + (l as i64 + m) as usize]);
            }
        }
        c
    })
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn parseval(c in coeffs(0)) {
        let g = SphereGrid::new(L).unwrap();
        let f = synthesize(&c, &g).unwrap();
        prop_assert!(close(f.dot(&f), c.power(), 1e-12));
    }

    #[test]
    fn scalar_round_trip(c in coeffs(0)) {
        let g = SphereGrid::minimal(L).unwrap();
        let back = analyze(&synthesize(&c, &g).unwrap());
        prop_assert!(back.sub(&c).max_abs() < 1e-12);
    }

    #[test]
    fn gradient_and_curl_parts_are_orthogonal(f in coeffs(1), h in coeffs(1)) {
        let g = SphereGrid::new(L).unwrap();
        let zero = ShCoefficients::zeros(L);
        let a = synthesize_oneform(&f, &zero, &g).unwrap();
        let b = synthesize_oneform(&zero, &h, &g).unwrap();
        prop_assert!(a.dot(&b).abs() < 1e-11 * (1.0 + a.norm() * b.norm()));
    }

    #[test]
    fn divergence_is_minus_adjoint_of_gradient(f in coeffs(0), e in coeffs(1), b in coeffs(1)) {
        let g = SphereGrid::new(L).unwrap();
        let s = synthesize(&f, &g).unwrap();
        let v = synthesize_oneform(&e, &b, &g).unwrap();
        let lhs = divergence_oneform(&v).dot(&s);
        let rhs = -v.dot(&gradient(&s));
        prop_assert!(close(lhs, rhs, 1e-11));
    }

    #[test]
    fn curl_kills_gradients(f in coeffs(0)) {
        let g = SphereGrid::new(L).unwrap();
        let s = synthesize(&f, &g).unwrap();
        prop_assert!(curl_oneform(&gradient(&s)).max_abs() < 1e-10 * (1.0 + s.max_abs()));
        prop_assert!(close(divergence_oneform(&gradient(&s)).norm(), laplacian(&s).norm(), 1e-12));
    }

    #[test]
    fn oneform_potentials_round_trip(e in coeffs(1), b in coeffs(1)) {
        let g = SphereGrid::new(L).unwrap();
        let v = synthesize_oneform(&e, &b, &g).unwrap();
        let (e2, b2) = analyze_oneform(&v);
        prop_assert!(e2.sub(&e).max_abs() < 1e-11 && b2.sub(&b).max_abs() < 1e-11);
    }

    #[test]
    fn stt_decomposition_round_trip(e in coeffs(2), b in coeffs(2)) {
        let g = SphereGrid::new(L).unwrap();
        let t = recompose_stt(&e, &b, &g).unwrap();
        let d = decompose_stt(&t);
        prop_assert!(d.electric.sub(&e).max_abs() < 1e-11 && d.magnetic.sub(&b).max_abs() < 1e-11);
        prop_assert!(d.truncation < 1e-12);
    }

    #[test]
    fn electric_and_magnetic_tensors_are_orthogonal(e in coeffs(2), b in coeffs(2)) {
        let g = SphereGrid::new(L).unwrap();
        let zero = ShCoefficients::zeros(L);
        let te = recompose_stt(&e, &zero, &g).unwrap();
        let tb = recompose_stt(&zero, &b, &g).unwrap();
        prop_assert!(te.dot(&tb).abs() < 1e-11 * (1.0 + te.norm() * tb.norm()));
    }

    #[test]
    fn stt_divergence_is_minus_adjoint_of_symmetrised_derivative(e in coeffs(2), f in coeffs(0)) {
        // ∫ (div T)·∇f = -∫ T : ∇∇f, and for STT T only the traceless
        // Hessian D̂²f contributes: -∫ T : D̂²f.
        let g = SphereGrid::new(L).unwrap();
        let zero = ShCoefficients::zeros(L);
        let t = recompose_stt(&e, &zero, &g).unwrap();
        let s = synthesize(&f, &g).unwrap();
        let lhs = divergence_stt(&t).unwrap().dot(&gradient(&s));
        let hess = recompose_stt(&f.without_degrees_below(2), &zero, &g).unwrap();
        // The divergence uses tabulated λ, good to ~1e-10 relative.
        prop_assert!(close(lhs, -t.dot(&hess), 1e-8));
    }

    #[test]
    fn invert_div_stt_inverts_divergence(e in coeffs(2)) {
        let g = SphereGrid::new(L).unwrap();
        let t = recompose_stt(&e, &ShCoefficients::zeros(L), &g).unwrap();
        let back = invert_div_stt(&divergence_stt(&t).unwrap()).unwrap();
        prop_assert!(back.sub(&t).max_abs() < 1e-10 * (1.0 + t.max_abs()));
    }

    #[test]
    fn poisson_inverts_laplacian(f in coeffs(1)) {
        let g = SphereGrid::new(L).unwrap();
        let s = synthesize(&f, &g).unwrap();
        let phi = solve_poisson(&laplacian(&s)).unwrap();
        prop_assert!(phi.sub(&s).max_abs() < 1e-11 * (1.0 + s.max_abs()));
        prop_assert!(phi.mean().abs() < 1e-13);
    }

    #[test]
    fn star_is_an_isometry_squaring_to_minus_one(e in coeffs(1), b in coeffs(1)) {
        let g = SphereGrid::new(L).unwrap();
        let v: OneFormField = synthesize_oneform(&e, &b, &g).unwrap();
        prop_assert!(close(v.star().norm(), v.norm(), 1e-14));
        prop_assert!(v.star().star().add(&v).max_abs() < 1e-15);
        let t: SttField = recompose_stt(&e.without_degrees_below(2), &b.without_degrees_below(2), &g).unwrap();
        prop_assert!(t.star().star().add(&t).max_abs() < 1e-15);
    }

    #[test]
    fn cumulative_rule_is_exact_for_cubics(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0) {
        let u = linspace(-1.0, 2.0, 31);
        let y: Vec<f64> = u.iter().map(|x| a + b * x + c * x * x + d * x * x * x).collect();
        let prim = |x: f64| a * x + b * x * x / 2.0 + c * x.powi(3) / 3.0 + d * x.powi(4) / 4.0;
        let cum = CumulativeRule::new(&u).apply(&y);
        for (x, v) in u.iter().zip(&cum) {
            prop_assert!((v - (prim(*x) - prim(-1.0))).abs() < 1e-12);
        }
    }

    #[test]
    fn derivative_rule_is_exact_for_quartics(a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0) {
        let u = linspace(-1.0, 1.0, 21);
        let y: Vec<f64> = u.iter().map(|x| a * x.powi(4) + b * x * x + c * x).collect();
        let d = DerivativeRule::new(&u).unwrap().apply(&y);
        for (x, v) in u.iter().zip(&d) {
            prop_assert!((v - (4.0 * a * x.powi(3) + 2.0 * b * x + c)).abs() < 1e-10);
        }
    }
}
