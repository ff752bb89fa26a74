//! Render a phase portrait with basin shading to an SVG file.

use bistable::cli::svg::{render_portrait, PortraitOptions};
use bistable::dynsys::builtin;
use bistable::flow::{analyze_flow, FlowConfig};
use bistable::region::builtin_region;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("griffith", &[])?;
    let region = builtin_region(&f)?;
    let fs = analyze_flow(&f, &region, &FlowConfig::default())?;
    let opts = PortraitOptions {
        basins: Some(48),
        ..PortraitOptions::default()
    };
    let svg = render_portrait(&f, &region, &fs, &opts);
    let path = std::env::temp_dir().join("griffith_portrait.svg");
    std::fs::write(&path, &svg)?;
    println!("wrote {} ({} bytes)", path.display(), svg.len());
    Ok(())
}
