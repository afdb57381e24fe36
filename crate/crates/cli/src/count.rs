//! FoV cardinality pmf of a scenario's model.

use std::path::Path;
use std::sync::Arc;

use fovstat::cardinality::{pmf_moments, void_probability, PreparedModel};
use fovstat::SplitLibrary;
use serde::Serialize;

use crate::error::CliResult;
use crate::output::{fmt_f64, write_csv, write_json};
use crate::scenario::{PmfMethodSpec, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CardinalityReport {
    pub family: &'static str,
    pub method: &'static str,
    pub mass_method: &'static str,
    pub probabilities: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
    pub void_probability: f64,
}

pub fn run_cardinality(
    scenario: &Scenario,
    library: &Arc<SplitLibrary>,
    method: PmfMethodSpec,
    out: Option<&Path>,
) -> CliResult<CardinalityReport> {
    let model = scenario.model()?;
    let fov = scenario.fov()?;
    let mass_method = scenario.mass_method(library)?;
    let pmf_method = scenario.pmf_method(method);
    let pmf = PreparedModel::new(&model, &mass_method)?.pmf(&fov, pmf_method)?;
    let (mean, variance) = pmf_moments(&pmf);
    let report = CardinalityReport {
        family: model.family(),
        method: pmf_method.name(),
        mass_method: mass_method.name(),
        void_probability: void_probability(&pmf),
        probabilities: pmf.into_probs(),
        mean,
        variance,
    };
    if let Some(dir) = out {
        write_pmf_csv(&dir.join("pmf.csv"), &report.probabilities)?;
        write_json(&dir.join("pmf.json"), &report)?;
    }
    Ok(report)
}

pub fn write_pmf_csv(path: &Path, probs: &[f64]) -> CliResult<()> {
    write_csv(
        path,
        &["n".into(), "probability".into()],
        probs.iter().enumerate().map(|(n, p)| vec![n.to_string(), fmt_f64(*p)]),
    )
}

/// The pmf as CSV text, for printing.
pub fn pmf_csv_text(probs: &[f64]) -> String {
    let mut s = String::from("n,probability\n");
    for (n, p) in probs.iter().enumerate() {
        s.push_str(&format!("{n},{}\n", fmt_f64(*p)));
    }
    s
}
