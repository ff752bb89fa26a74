//! Winding numbers of the gene switch around single equilibria and around
//! all three at once.

use bistable::dynsys::builtin;
use bistable::equilibria::classify;
use bistable::topo::{additivity_check, equilibrium_index, winding_number, ClosedCurve};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("griffith", &[])?;
    let eqs = [
        classify(&f, [0.0, 0.0])?,
        classify(&f, [0.5, 0.5])?,
        classify(&f, [2.0, 2.0])?,
    ];
    for e in &eqs {
        println!("{:<11} at ({}, {}): index {}", e.class.name(), e.point[0], e.point[1], equilibrium_index(&f, e, &eqs)?);
    }
    let saddle_only = ClosedCurve::circle([0.5, 0.5], 0.2, 128);
    println!("circle around the saddle: {}", winding_number(&f, &saddle_only)?);

    let all = ClosedCurve::boundary(vec![[-0.5, -0.4], [4.0, -0.4], [4.0, 3.0], [-0.5, 3.0]], 512);
    let add = additivity_check(&f, &all, &eqs)?;
    println!(
        "region boundary: winding {} vs index sum {} -> {}",
        add.winding,
        add.index_sum,
        if add.passed() { "consistent" } else { "MISMATCH" }
    );
    Ok(())
}
