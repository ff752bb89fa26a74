mod common;

use bistable::dynsys::{builtin, make_system, ModelSpec, VectorField};
use bistable::equilibria::classify;
use bistable::flow::{analyze_flow, FlowConfig};
use bistable::region::builtin_region;
use bistable::topo::{additivity_check, winding_number, ClosedCurve};
use common::Cubic;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn planar(rhs: [&str; 2], params: Vec<(String, f64)>) -> VectorField {
    make_system(ModelSpec {
        name: "test".into(),
        states: vec!["x".into(), "y".into()],
        params,
        rhs: vec![rhs[0].into(), rhs[1].into()],
    })
    .unwrap()
}

#[test]
fn griffith_big_circle_adds_up() {
    let f = builtin("griffith", &[]).unwrap();
    let eqs: Vec<_> = [[0.0, 0.0], [0.5, 0.5], [2.0, 2.0]]
        .iter()
        .map(|p| classify(&f, *p).unwrap())
        .collect();
    let add = additivity_check(&f, &ClosedCurve::circle([1.0, 1.0], 3.0, 256), &eqs).unwrap();
    assert_eq!((add.winding, add.index_sum), (1, 1));
    assert_eq!(winding_number(&f, &ClosedCurve::circle([2.0, 2.0], 0.1, 64)).unwrap(), 1);
}

#[test]
fn sir_region_boundary_adds_up() {
    let f = builtin("sir_treatment", &[]).unwrap();
    let region = builtin_region(&f).unwrap();
    let fs = analyze_flow(&f, &region, &FlowConfig::default()).unwrap();
    assert_eq!(fs.equilibria.len(), 3);
    let boxed = ClosedCurve::polygon(vec![[-5.0, -5.0], [170.0, -5.0], [170.0, 40.0], [-5.0, 40.0]], 512);
    let own = region.as_curve(512).unwrap();
    for curve in [boxed, own] {
        let add = additivity_check(&f, &curve, &fs.equilibria).unwrap();
        assert!(add.passed());
        assert_eq!(add.winding, 1);
    }
}

#[test]
fn winding_is_stable_under_resampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let c = Cubic::random(&mut rng);
        let f = c.field();
        let curve = ClosedCurve::circle([0.1, -0.2], 1.3, 32);
        let coarse = winding_number(&f, &curve);
        let fine = winding_number(&f, &curve.resampled(1024));
        if let (Ok(a), Ok(b)) = (coarse, fine) {
            assert_eq!(a, b);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Linear fields wind once per circle around the origin, with the sign
    /// of the determinant.
    #[test]
    fn linear_field_winding_is_sign_of_det(
        a in -2.0f64..2.0, b in -2.0f64..2.0, c in -2.0f64..2.0, d in -2.0f64..2.0,
        cx in -0.3f64..0.3, cy in -0.3f64..0.3, r in 0.5f64..3.0,
    ) {
        let det: f64 = a * d - b * c;
        prop_assume!(det.abs() > 1e-3);
        let params = vec![("a".into(), a), ("b".into(), b), ("c".into(), c), ("d".into(), d)];
        let f = planar(["a*x + b*y", "c*x + d*y"], params);
        let w = winding_number(&f, &ClosedCurve::circle([cx, cy], r, 64)).unwrap();
        prop_assert_eq!(w, det.signum() as i32);
    }

    /// (x + iy)^n winds n times; its conjugate winds -n times.
    #[test]
    fn complex_powers(n in 1i32..4, cx in -0.4f64..0.4, cy in -0.4f64..0.4, r in 0.6f64..2.0) {
        let (re, im) = match n {
            1 => ("x", "y"),
            2 => ("x^2 - y^2", "2*x*y"),
            _ => ("x^3 - 3*x*y^2", "3*x^2*y - y^3"),
        };
        let curve = ClosedCurve::circle([cx, cy], r, 64);
        let f = planar([re, im], vec![]);
        prop_assert_eq!(winding_number(&f, &curve).unwrap(), n);
        let neg = format!("-({im})");
        let g = planar([re, &neg], vec![]);
        prop_assert_eq!(winding_number(&g, &curve).unwrap(), -n);
    }

    /// Circles that enclose no zero of z^2 - 1 wind zero times.
    #[test]
    fn empty_interior_winds_zero(cx in -3.0f64..3.0, cy in 0.3f64..3.0) {
        let f = planar(["x^2 - y^2 - 1", "2*x*y"], vec![]);
        let r = 0.9 * cy;
        let w = winding_number(&f, &ClosedCurve::circle([cx, cy], r, 64)).unwrap();
        prop_assert_eq!(w, 0);
    }
}
