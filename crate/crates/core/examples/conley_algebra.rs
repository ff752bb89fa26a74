//! Pointed-sphere wedges: the index values the checks compare against.

use bistable::conley::{
    component_index_from_entries, component_index_with_loop, index_of_planar_cycle, index_of_template,
    wedge, ConleyIndex, IndexPairTemplate,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let saddle = ConleyIndex::sphere(1);
    let source = ConleyIndex::sphere(2);
    println!("saddle ∨ source = {}", wedge(&saddle, &source));
    println!("with trivial    = {}", saddle.wedge(&ConleyIndex::trivial()));

    for t in IndexPairTemplate::ALL {
        println!("{t:?}: {}", index_of_template(t));
    }
    for n in 0..4 {
        println!(
            "n={n}: loop-free {}, with loop {}",
            component_index_from_entries(n)?,
            component_index_with_loop(n)?
        );
    }
    println!("cycle with multiplier 1.7: {}", index_of_planar_cycle(1.7)?);
    println!("cycle with multiplier 0.3: {}", index_of_planar_cycle(0.3)?);
    Ok(())
}
