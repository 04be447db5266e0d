//! Regenerates `assets/desk` and `assets/demo`.
//!
//! cargo run --release -p sonomorph-harness --example make_desk [ASSETS_DIR]

use std::path::PathBuf;

use sonomorph_harness::desk::{write_demo, write_desk};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../assets"));
    let desk = root.join("desk");
    let summary = write_desk(&desk)?;
    eprintln!(
        "desk: {} seeds, {} voiced words, threshold {:.4} (fit {}/{} clips at {:.2}, held-out {:?})",
        summary.seeds,
        summary.words,
        summary.calibration.threshold,
        summary.calibration.fit_clips,
        summary.calibration.fit_clips + summary.calibration.heldout_clips,
        summary.calibration.fit_accuracy,
        summary.calibration.heldout_accuracy,
    );
    write_demo(&desk, &root.join("demo"))?;
    eprintln!("demo: fixtures recorded");
    Ok(())
}
