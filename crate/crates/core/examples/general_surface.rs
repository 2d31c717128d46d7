//! Surfaces of other genus and degree, given by an unnormalised class.

use hextremal::{bando_futaki, class_integrals, recover_phi, solve_bvp, SurfaceSpec};

fn main() -> hextremal::Result<()> {
    let cases = [(3, -2, 2.0, 3.0), (4, -1, 1.0, 5.0), (2, 1, 0.5, 0.5), (5, 3, 2.0, 1.0)];
    for (g, d, a, b) in cases {
        let spec = SurfaceSpec::new(g, d, a, b)?;
        let prof = recover_phi(&solve_bvp(&spec, 1e-9)?)?;
        let areas = class_integrals(&prof);
        let rep = bando_futaki(&prof);
        println!(
            "g={g} d={d:+} m={:.3}  C*={:+.8}  fibre area {:.6}  {:?}-section area {:.6}  lambda0={:+.6}",
            spec.m, prof.bvp.c_star, areas.fibre_area, areas.section, areas.section_area, rep.lambda0
        );
    }
    Ok(())
}
