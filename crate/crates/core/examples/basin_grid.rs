//! Label a grid of initial conditions by the attractor they reach.

use bistable::dynsys::builtin;
use bistable::flow::{analyze_flow, basin_map, FlowConfig};
use bistable::region::builtin_region;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("competition_lv", &[])?;
    let region = builtin_region(&f)?;
    let fs = analyze_flow(&f, &region, &FlowConfig::default())?;
    let map = basin_map(&f, &region, &fs, 24);
    for (label, n) in &map.counts {
        println!("label {label:>2}: {n} cells");
    }

    // coarse picture, top row first
    let glyph = |l: i64| match l {
        0 => 'a',
        1 => 'b',
        -2 => ' ',
        _ => '?',
    };
    for iy in (0..map.ny).rev() {
        let row: String = (0..map.nx).map(|ix| glyph(map.cells[iy * map.nx + ix].3)).collect();
        println!("{row}");
    }
    Ok(())
}
