//! Regenerates `data/split_library.json` with the default grid and settings.
//!
//! ```text
//! cargo run -p fovstat --example regenerate_library --release
//! ```

use fovstat::splitlib::{OptimizerSettings, SplitLibrary, DEFAULT_COMPONENTS, DEFAULT_LAMBDAS};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let lib = SplitLibrary::generate(&DEFAULT_COMPONENTS, &DEFAULT_LAMBDAS, &OptimizerSettings::default())?;
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/split_library.json");
    lib.save(path)?;
    for e in &lib.entries {
        println!(
            "R={} lambda={:e} sigma={:.6} J={:.6e} var={:.6} converged={}",
            e.components,
            e.lambda,
            e.sigma,
            e.achieved_cost,
            e.variance(),
            e.converged
        );
    }
    Ok(())
}
