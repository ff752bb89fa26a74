//! Find the stable cycle of the group-defense predator-prey model and its
//! Floquet multiplier.

use bistable::dynsys::builtin;
use bistable::equilibria::{classify, find_equilibria, EqClass, SearchBox};
use bistable::flow::{find_limit_cycle, FlowConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("group_defense", &[])?;
    let found = find_equilibria(&f, &SearchBox::new([0.0, 0.0], [7.0, 5.0]), [64, 64]);
    let focus = found
        .equilibria
        .iter()
        .find(|e| e.class == EqClass::UnstableFocus)
        .ok_or("no unstable focus")?;
    let stops: Vec<_> = found.equilibria.iter().map(|e| e.point).collect();
    let cycle = find_limit_cycle(&f, &classify(&f, focus.point)?, 6.0, None, &stops, &FlowConfig::default())?
        .ok_or("no cycle")?;
    println!("period       {:.6}", cycle.period);
    println!("multiplier   {:.6} (half step {:.6})", cycle.multiplier, cycle.multiplier_half);
    println!("stability    {:?}, index {}", cycle.stability, cycle.index()?);
    println!("closure      {:.2e}", cycle.closure);
    Ok(())
}
