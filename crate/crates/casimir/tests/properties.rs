use casimir::algebra::{hermiticity_residual, star_product, PairingKind, RegularFunctional};
use casimir::boundary::{
    casimir_kernel_closed, casimir_kernel_series, lattice_sum_closed, BoundaryState,
    ImageSeriesConfig,
};
use casimir::fields::{
    antisymmetrize, image_n, make_bump, non_injectivity_pair, odd_extension, Field, Geometry,
    Point4, TestFunction,
};
use casimir::kernels::{kms_kernel, vacuum_kernel, EpsilonKernel, StateSpec};
use casimir::Complex64;
use proptest::prelude::*;

fn point(z: impl Strategy<Value = f64>) -> impl Strategy<Value = Point4> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, z).prop_map(|(t, x, y, z)| Point4::new(t, x, y, z))
}

/// A bump whose z-support lies strictly inside (0, d).
fn slab_bump(d: f64) -> impl Strategy<Value = TestFunction> {
    (
        point(0.0..1.0),
        0.1..0.5f64,
        0.1..0.5f64,
        0.05..0.45f64,
        0.5..2.0f64,
    )
        .prop_map(move |(c, rt, rs, frac, amp)| {
            let rz = frac * d * 0.9;
            let lo = rz + 0.02 * d;
            let cz = lo + c.z * (d - 2.0 * lo);
            make_bump(c.with_z(cz), [rt, rs, rs, rz], amp).unwrap()
        })
}

/// Kernel value and its error bar; a missed accuracy target still carries the best value.
fn kernel_value(k: &EpsilonKernel, p: &Point4, q: &Point4, eps: f64) -> (Complex64, f64) {
    match k.eval_with_err(p, q, eps) {
        Ok(v) => (v.value, v.err),
        Err(casimir::Error::Accuracy { best, err, .. }) => (best, err),
        Err(e) => panic!("{e}"),
    }
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1e-300)
}

proptest! {
    #[test]
    fn bump_vanishes_off_support(f in slab_bump(1.0), p in point(-2.0..3.0)) {
        let s = f.support();
        let outside = (0..4).any(|k| {
            let v = p.to_array()[k];
            v <= s[k].0 || v >= s[k].1
        });
        if outside {
            prop_assert_eq!(f.eval(&p), 0.0);
        }
        prop_assert!((f.eval(&f.center) - f.amplitude).abs() <= 1e-15 * f.amplitude);
    }

    #[test]
    fn interval_is_symmetric(p in point(-2.0..2.0), q in point(-2.0..2.0)) {
        prop_assert_eq!(p.interval(&q), q.interval(&p));
        let d = p.minus(&q).to_array();
        prop_assert!((p.interval(&q) - (-d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3])).abs() <= 1e-14);
    }

    #[test]
    fn image_operator_is_odd_and_periodic(d in 0.5..2.0f64, f in slab_bump(1.0), p in point(-3.0..3.0)) {
        let f = f.with_center_z(f.center.z * d);
        prop_assume!(f.inside(&Geometry::Slab { d }));
        let n = image_n(f, d, None).unwrap();
        let v = n.eval(&p);
        prop_assert!((n.eval(&p.reflected()) + v).abs() <= 1e-15);
        prop_assert!((n.eval(&p.with_z(p.z + 2.0 * d)) - v).abs() <= 1e-15);
    }

    #[test]
    fn image_operator_restricts_to_base(f in slab_bump(1.0), p in point(0.0..1.0)) {
        let n = image_n(f, 1.0, None).unwrap();
        prop_assert!((n.eval(&p) - f.eval(&p)).abs() <= 1e-15);
        prop_assert!((n.eval(&p.reflected()) + f.eval(&p)).abs() <= 1e-15);
    }

    #[test]
    fn antisymmetrized_odd_extension_is_identity(f in slab_bump(1.0), p in point(0.0..1.5)) {
        let u = antisymmetrize(odd_extension(&f).unwrap());
        prop_assert!((u.eval(&p) - f.eval(&p)).abs() <= 1e-15 * f.amplitude.max(1.0));
    }

    #[test]
    fn state_kernels_are_hermitian(p in point(0.05..0.95), q in point(0.05..0.95), eps in 1e-3..0.1f64, beta in 0.5..5.0f64) {
        let slab = BoundaryState::slab(1.0, StateSpec::Vacuum).unwrap().kernel();
        let kernels: [EpsilonKernel; 3] = [vacuum_kernel(), kms_kernel(beta).unwrap(), slab];
        for k in &kernels {
            let (a, ea) = kernel_value(k, &p, &q, eps);
            let (b, eb) = kernel_value(k, &q, &p, eps);
            prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm() + ea + eb, "{a} vs {b}");
        }
    }

    #[test]
    fn base_kernels_respect_z_symmetries(p in point(-1.0..1.0), q in point(-1.0..1.0), shift in -3.0..3.0f64, beta in 0.5..5.0f64) {
        for k in [vacuum_kernel(), kms_kernel(beta).unwrap()] {
            let a = k.eval(&p, &q, 1e-2).unwrap();
            prop_assert!(close(a, k.eval(&p.reflected(), &q.reflected(), 1e-2).unwrap(), 1e-13));
            prop_assert!(close(a, k.eval(&p.with_z(p.z + shift), &q.with_z(q.z + shift), 1e-2).unwrap(), 1e-10));
        }
    }

    #[test]
    fn slab_kernel_vanishes_on_the_plates(p in point(0.0..1.0), q in point(0.05..0.95), d in 0.5..2.0f64) {
        let q = q.with_z(q.z * d);
        let inner = casimir_kernel_closed(&p.with_z(0.5 * d), &q, 1e-3, d).unwrap().norm();
        for z in [0.0, d] {
            let v = casimir_kernel_closed(&p.with_z(z), &q, 1e-3, d).unwrap();
            prop_assert!(v.norm() <= 1e-10 * inner.max(1.0), "{v} at z = {z}");
        }
    }

    #[test]
    fn image_series_matches_closed_form(p in point(0.05..0.95), q in point(0.05..0.95)) {
        let st = BoundaryState::new(Geometry::Slab { d: 1.0 }, StateSpec::Vacuum, ImageSeriesConfig::new(500, 1e-8).unwrap()).unwrap();
        let (s, err) = match casimir_kernel_series(&st, &p, &q, 1e-3) {
            Ok(v) => (v.value, v.err),
            Err(casimir::Error::Accuracy { best, err, .. }) => (best, err),
            Err(e) => panic!("{e}"),
        };
        let c = casimir_kernel_closed(&p, &q, 1e-3, 1.0).unwrap();
        prop_assert!((s - c).norm() <= 1e-6 * c.norm() + err, "{s} vs {c}");
    }

    #[test]
    fn lattice_identity(a in 0.05..3.0f64, b in -1.0..1.0f64) {
        let direct: f64 = (-20000..=20000).map(|n| 1.0 / (a * a + (b + n as f64).powi(2))).sum();
        // tail beyond |n| = 20000 contributes about 2/20000
        prop_assert!((lattice_sum_closed(a, b) - direct).abs() <= 2e-4);
    }

    #[test]
    fn functional_linearity_and_involution(ca in -2.0..2.0f64, cb in -2.0..2.0f64, f in slab_bump(1.0), g in slab_bump(1.0)) {
        let u = |h: &TestFunction| Complex64::new(h.integral(), 0.3 * h.center.t);
        let a = RegularFunctional::generator(&f).scale(Complex64::new(ca, 0.5));
        let b = RegularFunctional::quadratic(Complex64::new(cb, -1.0), &f, &g);
        let sum = a.clone().plus(&b);
        prop_assert!(close(sum.evaluate(u), a.evaluate(u) + b.evaluate(u), 1e-14));
        prop_assert_eq!(sum.star().star().normalized(), sum.clone().normalized());
        // (F*)(u) = conj(F(conj u))
        let ubar = |h: &TestFunction| u(h).conj();
        prop_assert!(close(sum.star().evaluate(u), sum.evaluate(ubar).conj(), 1e-14));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn star_product_degree_and_hermiticity(f in slab_bump(1.0), g in slab_bump(1.0)) {
        let (a, b) = (RegularFunctional::generator(&f), RegularFunctional::generator(&g));
        for kind in [PairingKind::MinkowskiE, PairingKind::DeformedH] {
            let p = star_product(&a, &b, kind).unwrap();
            prop_assert_eq!(p.degree(), 2);
            let h = hermiticity_residual(&a, &b, kind).unwrap();
            prop_assert!(h.max_coef() <= 1e-12 + h.err, "{:?}: {}", kind, h.max_coef());
        }
        let unit = star_product(&RegularFunctional::unit(), &a, PairingKind::MinkowskiE).unwrap();
        prop_assert_eq!(unit.normalized(), a.clone().normalized());
    }
}

#[test]
fn non_injectivity_witness_has_equal_images() {
    let perp = make_bump(Point4::new(0.0, 0.0, 0.0, 0.5), [0.3, 0.4, 0.4, 0.2], 1.0).unwrap();
    let d = 1.0;
    let (f, fp) = non_injectivity_pair(&perp, d).unwrap();
    let (nf, nfp) = (
        image_n(f.clone(), d, None).unwrap(),
        image_n(fp.clone(), d, None).unwrap(),
    );
    let mut differ: f64 = 0.0;
    for i in 0..400 {
        let z = -2.0 + 4.0 * i as f64 / 399.0;
        let p = Point4::new(0.05, 0.1, -0.1, z);
        assert!((nf.eval(&p) - nfp.eval(&p)).abs() <= 1e-14, "z = {z}");
        differ = differ.max((f.eval(&p) - fp.eval(&p)).abs());
    }
    assert!(differ > 0.1);
}
