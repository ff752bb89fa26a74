use bistable::cli::run_with;
use bistable::cli::svg::{render_portrait, PortraitOptions};
use bistable::dynsys::builtin;
use bistable::flow::{analyze_flow, FlowConfig};
use bistable::region::builtin_region;

fn count(doc: &roxmltree::Document, tag: &str, class: &str) -> usize {
    doc.descendants()
        .filter(|n| n.has_tag_name(tag))
        .filter(|n| {
            n.attribute("class")
                .is_some_and(|c| c.split_whitespace().any(|w| w == class))
        })
        .count()
}

fn portrait(name: &str, opts: &PortraitOptions) -> (String, usize) {
    let f = builtin(name, &[]).unwrap();
    let region = builtin_region(&f).unwrap();
    let fs = analyze_flow(&f, &region, &FlowConfig::default()).unwrap();
    (render_portrait(&f, &region, &fs, opts), fs.equilibria.len())
}

#[test]
fn structural_counts() {
    for (name, n) in [("griffith", 7), ("competition_lv", 12), ("budworm", 3)] {
        let opts = PortraitOptions {
            trajectories: n,
            ..PortraitOptions::default()
        };
        let (svg, eqs) = portrait(name, &opts);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(count(&doc, "polyline", "trajectory"), n, "{name}");
        assert_eq!(count(&doc, "circle", "equilibrium"), eqs, "{name}");
        assert_eq!(count(&doc, "rect", "basin"), 0);
    }
}

#[test]
fn viewbox_fits_region_with_margin() {
    let (svg, _) = portrait("griffith", &PortraitOptions::default());
    let doc = roxmltree::Document::parse(&svg).unwrap();
    let root = doc.root_element();
    let vb: Vec<f64> = root
        .attribute("viewBox")
        .unwrap()
        .split_whitespace()
        .map(|s| s.parse().unwrap())
        .collect();
    // region is 4.5 x 3.4; with 5% margins the aspect ratio is unchanged
    assert!((vb[3] / vb[2] - 3.4 / 4.5).abs() < 1e-3);
    // the lower node (0,0) is drawn below the upper one (2,2)
    let ys: Vec<f64> = doc
        .descendants()
        .filter(|n| n.has_tag_name("circle"))
        .map(|n| n.attribute("cy").unwrap().parse().unwrap())
        .collect();
    assert!(ys[0] > ys[2]);
}

#[test]
fn basins_nullclines_and_separatrix_layers() {
    let opts = PortraitOptions {
        trajectories: 0,
        nullclines: true,
        basins: Some(20),
    };
    let (svg, _) = portrait("griffith", &opts);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert!(count(&doc, "rect", "basin") > 0);
    assert_eq!(count(&doc, "path", "nullcline"), 2);
    assert_eq!(count(&doc, "polyline", "separatrix"), 2);
    assert_eq!(count(&doc, "polyline", "trajectory"), 0);

    let off = PortraitOptions {
        nullclines: false,
        ..opts
    };
    let (svg, _) = portrait("griffith", &off);
    let doc = roxmltree::Document::parse(&svg).unwrap();
    assert_eq!(count(&doc, "path", "nullcline"), 0);
}

#[test]
fn cli_portrait_writes_valid_xml() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("p.svg");
    let argv = ["bistable", "portrait", "group_defense", "--svg", out.to_str().unwrap(), "--trajectories", "5"];
    let code = run_with(argv, &mut Vec::new(), &mut Vec::new());
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(&out).unwrap();
    let doc = roxmltree::Document::parse(&text).unwrap();
    assert_eq!(count(&doc, "polyline", "trajectory"), 5);
    assert_eq!(count(&doc, "polyline", "cycle"), 1);
    assert_eq!(count(&doc, "circle", "equilibrium"), 3);
}
