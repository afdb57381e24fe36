//! Negative-information demo: a constant-velocity object crosses a fixed FoV
//! that reports no detection at each step.

use std::path::Path;

use fovstat::fov::FieldOfView;
use fovstat::gmix::{merge_and_prune, GaussianMixture};
use fovstat::models::{fov_mass, FovMassMethod};
use fovstat::partition::{update_nondetection, SplitConfig};
use fovstat::planner::candidate_grid;
use fovstat::rng::derive_seed;
use fovstat::SplitLibrary;
use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{CliError, CliResult};
use crate::output::{coord_names, fmt_f64, write_csv, write_json};
use crate::scenario::{DemoSpec, Scenario};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: usize,
    pub components_prior: usize,
    pub components_updated: usize,
    pub components_posterior: usize,
    pub splits_performed: usize,
    pub depth_reached: usize,
    pub depth_capped: bool,
    /// Prior mass of inside components after refinement.
    pub prior_inside_partition: f64,
    /// Sampled FoV mass of the prior.
    pub prior_inside_sampled: f64,
    /// Sampled FoV mass of the posterior.
    pub posterior_inside_sampled: f64,
    /// Probability of the no-detection report under the prior.
    pub retained_mass: f64,
    /// `|Σw − 1|` of the posterior.
    pub normalization_error: f64,
}

#[derive(Debug, Clone)]
pub struct DemoReport {
    pub steps: Vec<StepReport>,
    pub posterior: GaussianMixture<f64>,
}

/// Constant-velocity transition and white-acceleration noise for a state
/// laid out as `[position, velocity]`.
pub fn constant_velocity(n_p: usize, dt: f64, q: f64) -> (DMatrix<f64>, DMatrix<f64>) {
    let eye = DMatrix::<f64>::identity(n_p, n_p);
    let mut f = DMatrix::identity(2 * n_p, 2 * n_p);
    f.view_mut((0, n_p), (n_p, n_p)).copy_from(&(&eye * dt));
    let mut noise = DMatrix::zeros(2 * n_p, 2 * n_p);
    noise.view_mut((0, 0), (n_p, n_p)).copy_from(&(&eye * (q * dt.powi(3) / 3.0)));
    noise.view_mut((0, n_p), (n_p, n_p)).copy_from(&(&eye * (q * dt.powi(2) / 2.0)));
    noise.view_mut((n_p, 0), (n_p, n_p)).copy_from(&(&eye * (q * dt.powi(2) / 2.0)));
    noise.view_mut((n_p, n_p), (n_p, n_p)).copy_from(&(&eye * (q * dt)));
    (f, noise)
}

fn sampled_mass(gm: &GaussianMixture<f64>, fov: &FieldOfView<f64>, samples: usize, seed: u64) -> CliResult<f64> {
    Ok(fov_mass(gm, fov, &FovMassMethod::MonteCarlo { samples, seed })?)
}

fn write_grid(path: &Path, gm: &GaussianMixture<f64>, spec: &DemoSpec) -> CliResult<()> {
    let n_p = gm.position_dim();
    let roi = FieldOfView::new_box(spec.grid.lo.clone().into(), spec.grid.hi.clone().into())?;
    let points = candidate_grid(&roi, spec.grid.resolution)?;
    let mut header = coord_names("", n_p);
    header.push("density".into());
    write_csv(
        path,
        &header,
        points.iter().map(|x| {
            let mut row: Vec<String> = x.iter().map(|v| fmt_f64(*v)).collect();
            row.push(fmt_f64(gm.position_density(x)));
            row
        }),
    )
}

fn write_components(path: &Path, gm: &GaussianMixture<f64>) -> CliResult<()> {
    let n = gm.state_dim();
    let mut header = vec!["weight".to_string()];
    header.extend((0..n).map(|i| format!("m{i}")));
    header.extend((0..n).flat_map(|i| (0..n).map(move |j| format!("p{i}_{j}"))));
    write_csv(
        path,
        &header,
        gm.components().iter().map(|c| {
            let mut row = vec![fmt_f64(c.weight())];
            row.extend(c.mean().iter().map(|v| fmt_f64(*v)));
            // Row-major to match the header.
            row.extend(c.covariance().transpose().iter().map(|v| fmt_f64(*v)));
            row
        }),
    )
}

/// Runs the demo and, with `out`, writes per-step component tables, density
/// grids and a summary.
pub fn run_partition_demo(scenario: &Scenario, library: &SplitLibrary, out: Option<&Path>) -> CliResult<DemoReport> {
    let spec = scenario
        .demo
        .as_ref()
        .ok_or_else(|| CliError::Validation("scenario has no demo block".into()))?;
    let mut density = scenario.density()?;
    let fov = scenario.fov()?;
    let cfg: SplitConfig<f64> = scenario.split.config();
    cfg.validate()?;
    let n_p = density.position_dim();
    if density.state_dim() != 2 * n_p {
        return Err(CliError::Validation(format!(
            "demo needs a [position, velocity] state; got state dimension {} with position dimension {n_p}",
            density.state_dim()
        )));
    }
    if spec.grid.lo.len() != n_p || spec.grid.hi.len() != n_p {
        return Err(CliError::Validation("demo grid dimension does not match the position dimension".into()));
    }
    if spec.check_samples == 0 {
        return Err(CliError::Validation("check_samples must be positive".into()));
    }
    let (f, q) = constant_velocity(n_p, spec.dt, spec.process_noise);

    let mut steps = Vec::with_capacity(spec.steps);
    for step in 0..spec.steps {
        if step > 0 {
            density = density.propagate_linear(&f, &q)?;
        }
        let prior = density.clone();
        let check_seed = |k: u64| derive_seed(scenario.seed, 1000 + 2 * step as u64 + k);
        let prior_inside_sampled = sampled_mass(&prior, &fov, spec.check_samples, check_seed(0))?;

        let (posterior, retained, diag, kept) = if spec.negative_information {
            let upd = update_nondetection(&prior, &fov, spec.detection_probability, &cfg, library)?;
            let kept = upd.density.len();
            (upd.density, upd.retained_mass, Some(upd.diagnostics), kept)
        } else {
            (prior.clone(), 1.0, None, prior.len())
        };
        let reduced = merge_and_prune(&posterior, spec.prune_threshold, spec.merge_threshold)?;
        density = reduced.normalized()?;
        let posterior_inside_sampled = sampled_mass(&density, &fov, spec.check_samples, check_seed(1))?;

        let report = StepReport {
            step,
            components_prior: prior.len(),
            components_updated: kept,
            components_posterior: density.len(),
            splits_performed: diag.map_or(0, |d| d.splits_performed),
            depth_reached: diag.map_or(0, |d| d.depth_reached),
            depth_capped: diag.is_some_and(|d| d.depth_capped),
            prior_inside_partition: diag.map_or(f64::NAN, |d| d.mass_inside),
            prior_inside_sampled,
            posterior_inside_sampled,
            retained_mass: retained,
            normalization_error: (density.total_weight() - 1.0).abs(),
        };
        log::info!(
            "step {step}: {} -> {} components, sampled FoV mass {:.4} -> {:.4}",
            report.components_prior,
            report.components_posterior,
            prior_inside_sampled,
            posterior_inside_sampled
        );
        if let Some(dir) = out {
            write_grid(&dir.join(format!("step{step}_prior_grid.csv")), &prior, spec)?;
            write_grid(&dir.join(format!("step{step}_posterior_grid.csv")), &density, spec)?;
            write_components(&dir.join(format!("step{step}_prior_components.csv")), &prior)?;
            write_components(&dir.join(format!("step{step}_posterior_components.csv")), &density)?;
        }
        steps.push(report);
    }
    if let Some(dir) = out {
        write_json(&dir.join("summary.json"), &steps)?;
    }
    Ok(DemoReport {
        steps,
        posterior: density,
    })
}
