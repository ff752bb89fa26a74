//! Sweep the treatment capacity of the SIR model.

use bistable::dynsys::builtin;
use bistable::verifier::{sweep, RegionSource, VerifyOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = builtin("sir_treatment", &[])?;
    let rows = sweep(&f, "alpha", &[0.0, 6.0], &RegionSource::Builtin, &VerifyOptions::default())?;
    for r in rows {
        println!(
            "alpha={:<4} attractors={} case={:?} passed={} failed={} changed={}",
            r.value, r.attractors, r.case, r.passed, r.failed, r.changed
        );
    }
    Ok(())
}
