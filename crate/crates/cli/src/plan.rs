//! FoV placement over a grid of candidate centers.

use std::path::Path;
use std::sync::Arc;

use fovstat::cardinality::pmf_moments;
use fovstat::models::RfsModel;
use fovstat::planner::{grid_search, phd_grid, PlacementQuery, PlacementResult};
use fovstat::SplitLibrary;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{coord_names, fmt_f64, write_csv, write_json};
use crate::scenario::{PmfMethodSpec, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestPlacement {
    pub best_index: usize,
    pub best_center: Vec<f64>,
    pub best_variance: f64,
    pub best_mean: f64,
    pub best_pmf: Vec<f64>,
    pub candidates: usize,
    pub method: &'static str,
    pub mass_method: &'static str,
}

#[derive(Debug, Clone)]
pub struct PlanReport {
    pub model: RfsModel<f64>,
    pub result: PlacementResult<f64>,
    pub best: BestPlacement,
}

/// Runs the grid search. `method` overrides the scenario's pmf method. With
/// `out`, writes `variance_map.csv`, `phd_grid.csv`, `means.csv` for
/// multi-Bernoulli models, and `best.json`.
pub fn run_plan(
    scenario: &Scenario,
    library: &Arc<SplitLibrary>,
    method: Option<PmfMethodSpec>,
    out: Option<&Path>,
) -> CliResult<PlanReport> {
    let spec = scenario
        .plan
        .as_ref()
        .ok_or_else(|| CliError::Validation("scenario has no plan block".into()))?;
    let model = scenario.model()?;
    let mass_method = scenario.mass_method(library)?;
    let pmf_method = scenario.pmf_method(method.unwrap_or(spec.pmf_method));
    let query = PlacementQuery {
        fov_template: spec.fov_template.build()?,
        roi: spec.roi.build()?,
        grid_resolution: spec.grid_resolution,
        model,
        pmf_method,
        mass_method,
    };
    let result = grid_search(&query)?;
    let best = BestPlacement {
        best_index: result.best_index,
        best_center: result.best_center.iter().copied().collect(),
        best_variance: result.best_variance,
        best_mean: pmf_moments(&result.best_pmf).0,
        best_pmf: result.best_pmf.probs().to_vec(),
        candidates: result.centers.len(),
        method: query.pmf_method.name(),
        mass_method: query.mass_method.name(),
    };
    if let Some(dir) = out {
        let dim = query.model.position_dim();
        let mut header = coord_names("c", dim);
        header.push("variance".into());
        write_csv(
            &dir.join("variance_map.csv"),
            &header,
            result.variance_map().map(|(c, v)| {
                let mut row: Vec<String> = c.iter().map(|x| fmt_f64(*x)).collect();
                row.push(fmt_f64(v));
                row
            }),
        )?;
        let phd_res = spec.phd_resolution.unwrap_or(spec.grid_resolution);
        let mut header = coord_names("", dim);
        header.push("phd".into());
        write_csv(
            &dir.join("phd_grid.csv"),
            &header,
            phd_grid(&query.model, &query.roi, phd_res)?.into_iter().map(|(x, d)| {
                let mut row: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
                row.push(fmt_f64(d));
                row
            }),
        )?;
        if let RfsModel::MultiBernoulli(mb) = &query.model {
            let mut header = coord_names("m", dim);
            header.push("existence".into());
            let rows = mb
                .components()
                .iter()
                .map(|b| {
                    let (mean, _) = b.density.marginalize_position().moments()?;
                    let mut row: Vec<String> = mean.iter().map(|v| fmt_f64(*v)).collect();
                    row.push(fmt_f64(b.existence));
                    Ok(row)
                })
                .collect::<CliResult<Vec<_>>>()?;
            write_csv(&dir.join("means.csv"), &header, rows)?;
        }
        write_json(&dir.join("best.json"), &best)?;
    }
    Ok(PlanReport {
        model: query.model,
        result,
        best,
    })
}
