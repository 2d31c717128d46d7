//! Solve for the shooting constant on the genus 2, degree -1 surface with
//! `m = 1` and print a coarse table of the momentum profile.

use hextremal::{recover_phi, solve_bvp, SurfaceSpec};

fn main() -> hextremal::Result<()> {
    let spec = SurfaceSpec::normalized(2, -1, 1.0)?;
    let bvp = solve_bvp(&spec, 1e-10)?;
    println!("C* = {:.10}  ({} bisection steps)", bvp.c_star, bvp.iterations);
    println!("A = {:.10}  B = {:.10}  gamma0 = {:.10}", bvp.coeffs.slope, bvp.coeffs.intercept, bvp.coeffs.gamma0);
    println!("relative endpoint residual {:.2e}", bvp.residuals.endpoint_rel);

    let prof = recover_phi(&bvp)?;
    println!("phi'(1) = {:+.8}  phi'(G) = {:+.8}", prof.phi_prime_left, prof.phi_prime_right);
    println!("{:>10} {:>14} {:>14}", "gamma", "phi", "lambda");
    for i in (0..prof.gamma.len()).step_by(64).chain([prof.gamma.len() - 1]) {
        println!("{:>10.5} {:>14.8} {:>14.8}", prof.gamma[i], prof.phi[i], prof.lambda[i]);
    }
    Ok(())
}
