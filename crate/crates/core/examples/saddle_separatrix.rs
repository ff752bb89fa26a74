//! Trace the four branches of the gene switch's saddle.

use bistable::dynsys::builtin;
use bistable::equilibria::classify;
use bistable::flow::{saddle_manifolds, FlowConfig};
use bistable::region::builtin_region;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("griffith", &[])?;
    let region = builtin_region(&f)?;
    let saddle = classify(&f, [0.5, 0.5])?;
    let branches = saddle_manifolds(&f, &saddle, &region, &[[0.0, 0.0], [2.0, 2.0]], &FlowConfig::default())?;
    for b in &branches {
        let (t, end) = b.path.last().copied().unwrap();
        println!(
            "{:<24} {:?}: {} points, ends at ({:.4}, {:.4}) after |t| = {:.3}",
            b.label(),
            b.end,
            b.path.len(),
            end[0],
            end[1],
            t.abs()
        );
    }
    Ok(())
}
