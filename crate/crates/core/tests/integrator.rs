use bistable::dynsys::{builtin, make_system, ModelSpec, VectorField};
use bistable::integrator::{integrate, step, Crossing, EventSpec, IntegrateError, Options, Termination};
use proptest::prelude::*;

fn oscillator() -> VectorField {
    make_system(ModelSpec {
        name: "oscillator".into(),
        states: vec!["x".into(), "y".into()],
        params: vec![],
        rhs: vec!["y".into(), "-x".into()],
    })
    .unwrap()
}

#[test]
fn griffith_orbit_reaches_upper_node() {
    let f = builtin("griffith", &[]).unwrap();
    let near = EventSpec::new(3, Crossing::Falling, true, |x| {
        (x[0] - 2.0).hypot(x[1] - 2.0) - 1e-4
    });
    let run = integrate(&f, [3.0, 3.0], (0.0, 200.0), &Options::default(), &[near]).unwrap();
    assert_eq!(run.termination, Termination::Event(3));
    let end = run.final_state();
    assert!(((end[0] - 2.0).hypot(end[1] - 2.0) - 1e-4).abs() < 1e-9);

    // a plain run from the same start settles at the same node
    let free = integrate(&f, [3.0, 3.0], (0.0, 200.0), &Options::default(), &[]).unwrap();
    let e = free.final_state();
    assert!((e[0] - 2.0).abs() < 1e-6 && (e[1] - 2.0).abs() < 1e-6);
}

#[test]
fn trajectory_csv_layout() {
    let run = integrate(&oscillator(), [1.0, 0.0], (0.0, 1.0), &Options::default(), &[]).unwrap();
    let csv = run.to_csv(2);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,x,y"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), run.samples.len());
    for (row, (t, x)) in rows.iter().zip(&run.samples) {
        let v: Vec<f64> = row.split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(v, vec![*t, x[0], x[1]]);
    }
}

#[test]
fn step_rejects_bad_sizes() {
    assert!(matches!(
        step(&oscillator(), &[1.0, 0.0], 0.0, 0.0, 1e-9),
        Err(IntegrateError::BadStep(_))
    ));
    assert!(matches!(
        integrate(&oscillator(), [f64::NAN, 0.0], (0.0, 1.0), &Options::default(), &[]),
        Err(IntegrateError::NonFinite)
    ));
}

#[test]
fn step_limit_is_reported() {
    let opts = Options {
        max_steps: 10,
        ..Options::default()
    };
    assert!(matches!(
        integrate(&oscillator(), [1.0, 0.0], (0.0, 1000.0), &opts, &[]),
        Err(IntegrateError::MaxSteps { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// The oscillator's exact solution is a rotation.
    #[test]
    fn oscillator_tracks_rotation(t1 in 0.1f64..20.0, phase in 0.0f64..std::f64::consts::TAU) {
        let x0 = [phase.cos(), phase.sin()];
        let run = integrate(&oscillator(), x0, (0.0, t1), &Options::with_tol(1e-10), &[]).unwrap();
        let e = run.final_state();
        let want = [(phase - t1).cos(), (phase - t1).sin()];
        prop_assert!((e[0] - want[0]).abs() < 1e-7 && (e[1] - want[1]).abs() < 1e-7);
    }

    /// Times move in the direction of the span, and events come in order.
    #[test]
    fn times_and_events_are_monotone(backward in any::<bool>(), t1 in 1.0f64..30.0) {
        let span = if backward { (t1, 0.0) } else { (0.0, t1) };
        let events = [
            EventSpec::new(0, Crossing::Either, false, |x| x[0]),
            EventSpec::new(1, Crossing::Either, false, |x| x[1]),
        ];
        let run = integrate(&oscillator(), [1.0, 0.0], span, &Options::default(), &events).unwrap();
        let sign = if backward { -1.0 } else { 1.0 };
        prop_assert!(run.samples.windows(2).all(|w| sign * (w[1].0 - w[0].0) > 0.0));
        prop_assert!(run.events.windows(2).all(|w| sign * (w[1].t - w[0].t) >= 0.0));
        // a zero of x or y every quarter turn
        let quarter = std::f64::consts::FRAC_PI_2;
        let expected = (t1 / quarter).floor() as usize;
        prop_assert!(run.events.len() >= expected.saturating_sub(1) && run.events.len() <= expected + 1);
    }
}
