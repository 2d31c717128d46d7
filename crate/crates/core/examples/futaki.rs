//! The Bando–Futaki obstruction along `∇λ` for a few classes, with the
//! volume and `∫λ ω²` from the fibre reduction.

use hextremal::geometry::fibre_reduced_integral;
use hextremal::{bando_futaki, recover_phi, solve_bvp, SurfaceSpec};

fn main() -> hextremal::Result<()> {
    for m in [0.5, 1.0, 4.0] {
        let spec = SurfaceSpec::normalized(2, -1, m)?;
        let prof = recover_phi(&solve_bvp(&spec, 1e-10)?)?;
        let rep = bando_futaki(&prof);
        println!(
            "m = {m:<4} lambda0 = {:+.8}  deviation = {:.6e}  kappa = {:.6}  value = {:.6e}  {:?}",
            rep.lambda0, rep.deviation, rep.kappa, rep.futaki_value, rep.verdict
        );
        let c = prof.coeffs();
        let vol = fibre_reduced_integral(&spec, |_| 1.0);
        let total = fibre_reduced_integral(&spec, |g| c.slope * g + c.intercept);
        println!("         volume {vol:.8}  mean of lambda {:+.8}", total / vol);
    }
    Ok(())
}
