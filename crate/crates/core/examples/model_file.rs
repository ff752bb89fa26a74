//! Read a model from the text format, verify it and print it back.

use bistable::cli::modelfile::{ModelFile, RegionSpec};
use bistable::dynsys::make_system;
use bistable::region::Region;
use bistable::verifier::{analyze, VerifyOptions};

const TOGGLE: &str = r#"
# two mutually repressing genes
[model]
name = toggle
dim = 2
state = u, v
params = a: 3, n: 2
du = "a/(1+v^n) - u"
dv = "a/(1+u^n) - v"

[region]
vertices = 0 0, 3.5 0, 3.5 3.5, 0 3.5
"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let file = ModelFile::parse(TOGGLE)?;
    print!("{file}");
    let RegionSpec::Polygon(v) = &file.region else {
        return Err("expected a polygon".into());
    };
    let region = Region::polygon("toggle", v.clone())?;
    let f = make_system(file.model.clone())?;
    let report = analyze(&f, &region, &VerifyOptions::default());
    println!("case {:?}, all pass: {}", report.case, report.all_applicable_pass());
    Ok(())
}
