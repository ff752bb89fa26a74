//! Certify that the flow points into a region along its whole boundary.

use bistable::dynsys::builtin;
use bistable::region::{builtin_region, verify_trapping_region, Region};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("griffith", &[])?;
    let good = builtin_region(&f)?;
    let c = verify_trapping_region(&f, &good, 256);
    println!("builtin rectangle: {} ({} samples)", c.status.label(), c.samples.len());

    // a box that cuts through the upper node's basin lets orbits escape
    let bad = Region::polygon("cut", vec![[-0.5, -0.4], [1.5, -0.4], [1.5, 3.0], [-0.5, 3.0]])?;
    let c = verify_trapping_region(&f, &bad, 256);
    println!("cut box: {} with {} outward samples", c.status.label(), c.offending.len());
    if let Some(&i) = c.offending.first() {
        let p = c.samples[i].point;
        println!("  first offending point ({:.3}, {:.3})", p[0], p[1]);
    }
    Ok(())
}
