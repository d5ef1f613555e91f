//! Full pipeline driven by a JSON config (default: `configs/box_eikonal.json`):
//! solve, then pointwise values and attainment of the absolute minimizer.
//!
//! `cargo run --example run_from_config -- crates/core/examples/configs/two_arc.json`

use std::path::PathBuf;

use supnorm::config::load_config;
use supnorm::run::{self, Problem};

fn main() -> supnorm::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/box_eikonal.json"));
    let cfg = load_config(&path)?;
    cfg.validate()?;
    let problem = Problem::from_config(&cfg)?;
    let out = std::env::temp_dir().join("supnorm-example");
    let solved = run::solve(&cfg, &problem, &out)?;
    println!("μ = {:.6}, {} absolutize sweeps", solved.trace.mu, solved.trace.sweeps);
    let others = [solved.solve.s_minus.clone(), solved.solve.s_plus.clone()];
    let report = run::attain(&cfg, &problem, &solved.abs.field, &others, solved.trace.mu, &out)?;
    println!("|A| = {}, sup h_du = {:.4}", report.set.len(), report.sup_value);
    for v in &report.inclusion_verdicts {
        println!("  inside {}: {:.3} (reverse {:.3})", v.name, v.fraction, v.reverse_fraction);
    }
    println!("files in {}", out.display());
    Ok(())
}
