use bistable::dynsys::{builtin, make_system, ModelSpec};
use bistable::region::{builtin_region, Region};
use bistable::verifier::{analyze, sweep, Case, RegionSource, Report, Status, VerifyError, VerifyOptions, SCHEMA};

fn report(name: &str) -> Report {
    let f = builtin(name, &[]).unwrap();
    let region = builtin_region(&f).unwrap();
    analyze(&f, &region, &VerifyOptions::default())
}

fn statuses(r: &Report) -> Vec<(&str, Status)> {
    r.checks.iter().map(|c| (c.id, c.status)).collect()
}

#[test]
fn every_builtin_passes_its_applicable_checks() {
    for name in ["griffith", "budworm", "sir_treatment", "competition_lv", "synthetic_loop", "synthetic_ring"] {
        let r = report(name);
        assert!(r.all_applicable_pass(), "{name}: {:?}", r.failed());
        assert_eq!(r.schema, SCHEMA);
        assert_eq!(r.checks.len(), 13);
    }
}

#[test]
fn group_defense_is_the_cycle_case() {
    let r = report("group_defense");
    assert_eq!(r.case, Case::CycleBesidePoint);
    assert!(r.all_applicable_pass(), "{:?}", r.failed());
    for id in ["C10", "C11", "C12"] {
        assert_eq!(r.check(id).unwrap().status, Status::Pass);
    }
    // a cycle case has no k
    assert_eq!(r.check("C4").unwrap().status, Status::Inapplicable);
}

#[test]
fn case_one_counts_for_griffith_and_ring() {
    let g = report("griffith");
    assert_eq!(g.case, Case::TwoPoint);
    assert_eq!(g.k, Some(0));
    let ring = report("synthetic_ring");
    assert_eq!(ring.k, Some(1));
    assert_eq!(ring.s_set.len(), 3);
}

#[test]
fn three_attractors_fail_the_precondition_only() {
    let f = make_system(ModelSpec {
        name: "tristable".into(),
        states: vec!["x".into(), "y".into()],
        params: vec![],
        rhs: vec!["-x*(x^2-1)*(x^2-4)".into(), "-y".into()],
    })
    .unwrap();
    let region = Region::polygon("box", vec![[-3.0, -1.0], [3.0, -1.0], [3.0, 1.0], [-3.0, 1.0]]).unwrap();
    let r = analyze(&f, &region, &VerifyOptions::default());
    assert_eq!(r.attractors.len(), 3);
    assert_eq!(r.case, Case::Unsupported);
    for (id, st) in statuses(&r) {
        let want = if id == "C1" { Status::Fail } else { Status::Inapplicable };
        assert_eq!(st, want, "{id}");
    }
}

#[test]
fn uncertified_region_fails_c1() {
    let f = builtin("griffith", &[]).unwrap();
    let region = Region::polygon("cut", vec![[-0.5, -0.4], [1.5, -0.4], [1.5, 3.0], [-0.5, 3.0]]).unwrap();
    let r = analyze(&f, &region, &VerifyOptions::default());
    assert_eq!(r.region.certification, "uncertified");
    assert_eq!(r.check("C1").unwrap().status, Status::Fail);
}

#[test]
fn json_carries_seed_schema_and_checks() {
    let f = builtin("sir_treatment", &[]).unwrap();
    let region = builtin_region(&f).unwrap();
    let opts = VerifyOptions {
        seed: 7,
        ..VerifyOptions::default()
    };
    let r = analyze(&f, &region, &opts);
    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(v["schema"], SCHEMA);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["case"], "two-point");
    assert_eq!(v["checks"].as_array().unwrap().len(), 13);
    for c in v["checks"].as_array().unwrap() {
        let st = c["status"].as_str().unwrap();
        assert!(["pass", "fail", "inapplicable"].contains(&st));
        assert!(c["id"].as_str().unwrap().starts_with('C'));
    }
    assert_eq!(v["separatrix"]["side_check"]["seed"], 7);
}

#[test]
fn sir_sweep_over_treatment_capacity() {
    let f = builtin("sir_treatment", &[]).unwrap();
    let rows = sweep(&f, "alpha", &[0.0, 6.0], &RegionSource::Builtin, &VerifyOptions::default()).unwrap();

    // without treatment the endemic state is unique: with c = d + gamma + eps,
    // I* = (beta Lambda / d - c) / (c (beta / d + kappa)), and R0 > 1 makes
    // the disease-free state a saddle
    let p = |n: &str| f.param(n).unwrap();
    let c = p("d") + p("gamma") + p("eps");
    let r0 = p("beta") * p("Lambda") / (p("d") * c);
    assert!(r0 > 1.0);
    let i_star = (p("beta") * p("Lambda") / p("d") - c) / (c * (p("beta") / p("d") + p("kappa")));
    let s_star = (p("Lambda") - c * i_star) / p("d");

    let row0 = &rows[0];
    assert_eq!(row0.attractors, 1);
    assert_eq!(row0.case, Case::Unsupported);
    let endemic = row0
        .equilibria
        .iter()
        .find(|e| {
            let pt = e.split_once("@(").unwrap().1.trim_end_matches(')');
            let xy: Vec<f64> = pt.split(',').map(|s| s.trim().parse().unwrap()).collect();
            (xy[0] - s_star).abs() < 1e-4 && (xy[1] - i_star).abs() < 1e-4
        })
        .expect("endemic equilibrium listed");
    assert!(endemic.starts_with("Stable"), "{endemic}");
    assert!(row0.equilibria.iter().any(|e| e.starts_with("Saddle@(160.000000")));

    let row6 = &rows[1];
    assert_eq!(row6.attractors, 2);
    assert_eq!(row6.case, Case::TwoPoint);
    assert_eq!(row6.failed, 0);
    assert!(row6.changed);
}

#[test]
fn sweep_edge_cases() {
    let f = builtin("griffith", &[]).unwrap();
    let opts = VerifyOptions::default();
    assert!(sweep(&f, "b", &[], &RegionSource::Builtin, &opts).unwrap().is_empty());
    assert!(matches!(
        sweep(&f, "b", &[0.4, 0.3], &RegionSource::Builtin, &opts),
        Err(VerifyError::Unordered)
    ));
    assert!(matches!(
        sweep(&f, "nope", &[0.4], &RegionSource::Builtin, &opts),
        Err(VerifyError::Model(_))
    ));
}
