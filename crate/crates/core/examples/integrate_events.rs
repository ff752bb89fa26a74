//! Integrate the gene switch and stop when the protein level crosses 1.

use bistable::dynsys::builtin;
use bistable::integrator::{integrate, Crossing, EventSpec, Options, Termination};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("griffith", &[])?;
    let cross = EventSpec::new(0, Crossing::Rising, true, |x| x[1] - 1.0);
    let run = integrate(&f, [3.0, 0.2], (0.0, 100.0), &Options::with_tol(1e-10), &[cross])?;
    match run.termination {
        Termination::Event(id) => {
            let ev = run.events.last().unwrap();
            println!("event {id} at t = {:.6}, state ({:.6}, {:.6})", ev.t, ev.state[0], ev.state[1]);
        }
        Termination::TimeLimit => println!("no crossing before t = {}", run.final_time()),
    }
    println!("{} accepted steps", run.samples.len() - 1);

    // without the event the orbit settles on the upper node
    let free = integrate(&f, [3.0, 0.2], (0.0, 200.0), &Options::default().endpoints_only(), &[])?;
    let end = free.final_state();
    println!("t = 200: ({:.8}, {:.8})", end[0], end[1]);
    Ok(())
}
