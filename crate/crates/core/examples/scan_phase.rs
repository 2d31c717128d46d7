//! Scan the shooting constant, then tabulate `C*(m)` and `M(m)`.

use hextremal::{phase_curve, scan_c, shoot::ScanOutcome, SolveOptions, SurfaceSpec};

fn main() -> hextremal::Result<()> {
    let opts = SolveOptions::default();
    let spec = SurfaceSpec::normalized(2, -1, 1.0)?;

    println!("scan over C for m = 1");
    for row in scan_c(&spec, -10.0, 30.0, 9, &opts)? {
        match row.outcome {
            ScanOutcome::Complete { v_end } => println!("  C = {:>6.1}  complete  v(end) = {v_end:.6}", row.c),
            ScanOutcome::Breakdown { gamma_star } => println!("  C = {:>6.1}  breakdown at {gamma_star:.6}", row.c),
            ScanOutcome::Failed { message } => println!("  C = {:>6.1}  failed: {message}", row.c),
        }
    }

    let specs = [0.25, 0.5, 1.0, 2.0, 5.0, 10.0]
        .iter()
        .map(|&m| SurfaceSpec::normalized(2, -1, m))
        .collect::<hextremal::Result<Vec<_>>>()?;
    println!("\n{:>6} {:>14} {:>14} {:>14}", "m", "C*", "M", "-N/L");
    for row in phase_curve(&specs, &opts)? {
        let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.8}"));
        println!("{:>6} {:>14} {:>14} {:>14.8}", row.m, show(row.c_star), show(row.threshold), row.c_lower_bound);
    }
    Ok(())
}
