//! Write a solve document to disk, read it back and verify it.
//!
//! `cargo run --example export -- out.json`

use std::path::PathBuf;

use hextremal::cli::{read_solve_document, solve_document, to_json, verify_document, Format, RunConfig};

fn main() -> hextremal::Result<()> {
    let path = std::env::args_os().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("hextremal-solve.json"));

    let config = RunConfig {
        command: "solve".into(),
        genus: 2,
        degree: -1,
        m: Some(2.0),
        a: None,
        b: None,
        tol: 1e-9,
        grid: 512,
        format: Format::Json,
    };
    let spec = config.spec()?;
    let doc = solve_document(&spec, config)?;
    std::fs::write(&path, to_json(&doc)).map_err(|source| hextremal::Error::Io { path: path.clone(), source })?;
    println!("wrote {}", path.display());

    let back = read_solve_document(&path)?;
    let report = verify_document(&back)?;
    for c in &report.checks {
        println!("  {:<22} {:>24.16e} {:>24.16e} {}", c.name, c.stored, c.recomputed, if c.ok { "ok" } else { "MISMATCH" });
    }
    println!("passed: {}", report.passed);
    Ok(())
}
