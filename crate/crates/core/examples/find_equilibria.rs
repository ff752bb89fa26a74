//! Locate and classify the equilibria of every planar builtin.

use bistable::dynsys::{builtin, builtin_names, fixture};
use bistable::equilibria::{find_equilibria, SearchBox};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for name in builtin_names() {
        let fx = fixture(name)?;
        let f = builtin(name, &[])?;
        let bx = SearchBox::new(fx.search_box.0, fx.search_box.1);
        let found = find_equilibria(&f, &bx, [64, 64]);
        println!("{name}:");
        for e in &found.equilibria {
            let pt = if f.dim() == 1 {
                format!("{:.8}", e.point[0])
            } else {
                format!("({:.8}, {:.8})", e.point[0], e.point[1])
            };
            println!("  {:<14} {pt}  u={}", e.class.name(), e.unstable_dim);
        }
    }
    Ok(())
}
