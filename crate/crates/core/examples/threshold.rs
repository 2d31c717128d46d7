//! Locate the existence threshold `M` and show what happens on either side.

use hextremal::ivp::integrate;
use hextremal::{coeffs_from_c, find_m, Status, SurfaceSpec};

fn main() -> hextremal::Result<()> {
    let spec = SurfaceSpec::normalized(2, -1, 1.0)?;
    let th = find_m(&spec, 1e-9)?;
    println!("M = {:.9} after {} steps, bracket [{:.12}, {:.12}]", th.value, th.iterations, th.lower, th.upper);

    for c in [th.value - 1e-2, th.value - 1e-5, th.value + 1e-5, th.value + 1e-2] {
        let traj = integrate(&coeffs_from_c(&spec, c), 1e-10, 512)?;
        match traj.status {
            Status::Complete => println!("C = {c:.6}: reaches the end with v/target = {:.6e}", traj.end_value() / spec.target()),
            Status::Breakdown { gamma_star } => println!("C = {c:.6}: breaks down at gamma* = {gamma_star:.8}"),
        }
    }
    Ok(())
}
