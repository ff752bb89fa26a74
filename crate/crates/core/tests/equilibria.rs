use bistable::dynsys::{builtin, fixture, make_system, ModelSpec};
use bistable::equilibria::{classify, find_equilibria, newton_refine, EqClass, NewtonError, SearchBox};

#[test]
fn griffith_box_holds_exactly_three_roots() {
    let f = builtin("griffith", &[]).unwrap();
    let found = find_equilibria(&f, &SearchBox::new([-0.5, -0.5], [4.0, 4.0]), [64, 64]);
    let pts: Vec<_> = found.equilibria.iter().map(|e| e.point).collect();
    assert_eq!(pts.len(), 3);
    for (p, want) in pts.iter().zip([[0.0, 0.0], [0.5, 0.5], [2.0, 2.0]]) {
        assert!((p[0] - want[0]).abs() < 1e-10 && (p[1] - want[1]).abs() < 1e-10);
    }
    assert!(found.degenerate.is_empty());
}

#[test]
fn newton_from_nearby_and_exact_guesses() {
    let f = builtin("griffith", &[]).unwrap();
    let p = newton_refine(&f, [1.9, 2.1]).unwrap();
    assert!((p[0] - 2.0).abs() < 1e-12 && (p[1] - 2.0).abs() < 1e-12);
    assert_eq!(newton_refine(&f, [2.0, 2.0]).unwrap(), [2.0, 2.0]);
}

#[test]
fn double_root_is_not_accepted() {
    let f = make_system(ModelSpec {
        name: "fold".into(),
        states: vec!["x".into()],
        params: vec![],
        rhs: vec!["x^2".into()],
    })
    .unwrap();
    match newton_refine(&f, [0.1, 0.0]) {
        Err(NewtonError::NoConvergence { .. } | NewtonError::Singular { .. }) => {}
        other => panic!("expected a refusal, got {other:?}"),
    }
}

#[test]
fn hand_computed_classes() {
    let f = builtin("griffith", &[]).unwrap();
    // J = [[-1, 1], [0.64, -0.4]] at the saddle: det = 0.4 - 0.64
    let s = classify(&f, [0.5, 0.5]).unwrap();
    assert_eq!((s.class, s.unstable_dim), (EqClass::Saddle, 1));
    // J = [[-1, 1], [0.16, -0.4]]: trace -1.4, det 0.24, discriminant 1
    let n = classify(&f, [2.0, 2.0]).unwrap();
    assert_eq!((n.class, n.unstable_dim), (EqClass::StableNode, 0));
    let mut ev: Vec<f64> = n.eigenvalues.iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    assert!((ev[0] + 1.2).abs() < 1e-12 && (ev[1] + 0.2).abs() < 1e-12);

    let g = builtin("group_defense", &[]).unwrap();
    let fx = fixture("group_defense").unwrap();
    let found = find_equilibria(&g, &SearchBox::new(fx.search_box.0, fx.search_box.1), [64, 64]);
    let lam = found
        .equilibria
        .iter()
        .min_by(|a, b| a.point[0].total_cmp(&b.point[0]))
        .unwrap();
    assert_eq!((lam.class, lam.unstable_dim), (EqClass::UnstableFocus, 2));
    assert!(lam.eigenvalues.iter().all(|z| z.im != 0.0 && z.re > 0.0));
}

#[test]
fn budworm_line_search() {
    let f = builtin("budworm", &[]).unwrap();
    let found = find_equilibria(&f, &SearchBox::new([-0.5, 0.0], [16.0, 0.0]), [512, 1]);
    let xs: Vec<f64> = found.equilibria.iter().map(|e| e.point[0]).collect();
    assert_eq!(xs.len(), 4);
    assert!(xs[0].abs() < 1e-12);
    assert!((xs[1] - 0.47).abs() < 0.01 && (xs[2] - 2.66).abs() < 0.01 && (xs[3] - 11.86).abs() < 0.01);
}
