//! Run every check on a model and print the JSON report.

use bistable::dynsys::builtin;
use bistable::region::builtin_region;
use bistable::verifier::{analyze, Status, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("sir_treatment", &[])?;
    let region = builtin_region(&f)?;
    let report = analyze(&f, &region, &VerifyOptions::default());
    for c in &report.checks {
        if c.status != Status::Inapplicable {
            println!("{:?} {} {}", c.status, c.id, c.evidence);
        }
    }
    println!("all applicable checks pass: {}", report.all_applicable_pass());
    let json = report.to_json();
    println!("{} bytes of JSON, starting:\n{}", json.len(), &json[..json.len().min(300)]);
    Ok(())
}
