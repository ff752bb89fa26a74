//! Parse a right-hand side, differentiate it and evaluate on a tape.

use bistable::expr::parse;
use std::collections::HashMap;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let e = parse("x^2/(1+x^2) - b*y", &["x", "y", "b"])?;
    let dx = e.differentiate("x");
    println!("f      = {e}");
    println!("df/dx  = {dx}");

    let env: HashMap<String, f64> = [("x", 1.0), ("y", 0.5), ("b", 0.4)]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    println!("f(1, 0.5)     = {}", e.eval(&env)?);
    println!("df/dx(1, 0.5) = {}", dx.eval(&env)?);

    // tapes take values by slot in symbol order
    let tape = e.compile();
    println!("tape of {} ops gives {}", tape.len(), tape.eval(&[1.0, 0.5, 0.4])?);

    match parse("x +* 2", &["x"]) {
        Ok(_) => println!("unexpectedly parsed"),
        Err(err) => println!("rejected: {err}"),
    }
    Ok(())
}
