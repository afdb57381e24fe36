//! Split-library generation.

use std::path::Path;

use fovstat::splitlib::{OptimizerSettings, SplitLibrary, MAX_COMPONENTS, MIN_COMPONENTS};

use crate::error::{CliError, CliResult};

pub fn generate_library(components: &[usize], lambdas: &[f64], out: &Path) -> CliResult<SplitLibrary> {
    if components.is_empty() || lambdas.is_empty() {
        return Err(CliError::Validation("need at least one R and one lambda".into()));
    }
    if let Some(r) = components.iter().find(|r| !(MIN_COMPONENTS..=MAX_COMPONENTS).contains(r)) {
        return Err(CliError::Validation(format!(
            "R = {r} is outside {MIN_COMPONENTS}..={MAX_COMPONENTS}"
        )));
    }
    if let Some(l) = lambdas.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(CliError::Validation(format!("lambda = {l} must be positive")));
    }
    let lib = SplitLibrary::generate(components, lambdas, &OptimizerSettings::default())?;
    lib.save(out)?;
    Ok(lib)
}
