//! Versioned JSON scenario files.
//!
//! Every object rejects unknown keys, so a misspelled parameter fails loudly
//! instead of silently falling back to a default. Box bounds may be `null`
//! for an unbounded side.

use std::path::Path;
use std::sync::Arc;

use fovstat::cardinality::PmfMethod;
use fovstat::fov::FieldOfView;
use fovstat::gmix::{GaussianComponent, GaussianMixture};
use fovstat::models::{
    sample_mb_scenario, Bernoulli, CovSpec, FovMassMethod, GlmbComponent, GlmbDistribution, IidcRfs, MultiBernoulli,
    PoissonRfs, RfsModel,
};
use fovstat::partition::SplitConfig;
use fovstat::rng::derive_seed;
use fovstat::SplitLibrary;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCENARIO_VERSION: u32 = 1;

/// Sub-seed indices derived from the scenario seed.
pub const SEED_MODEL: u64 = 0;
pub const SEED_MASS: u64 = 1;
pub const SEED_PMF: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub version: u32,
    #[serde(default)]
    pub seed: u64,
    /// Leading state coordinates that are position. Defaults to the full
    /// state.
    #[serde(default)]
    pub position_dim: Option<usize>,
    pub model: ModelSpec,
    #[serde(default)]
    pub fov: Option<FovSpec>,
    #[serde(default)]
    pub split: SplitSpec,
    #[serde(default)]
    pub mass_method: MassMethodSpec,
    #[serde(default)]
    pub demo: Option<DemoSpec>,
    #[serde(default)]
    pub plan: Option<PlanSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComponentSpec {
    pub weight: f64,
    pub mean: Vec<f64>,
    /// Row-major rows.
    pub covariance: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BernoulliSpec {
    pub existence: f64,
    pub density: Vec<ComponentSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlmbComponentSpec {
    pub weight: f64,
    pub labels: Vec<u64>,
    pub densities: Vec<Vec<ComponentSpec>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelSpec {
    /// Single-object density, used by the negative-information demo.
    Density {
        components: Vec<ComponentSpec>,
    },
    Poisson {
        intensity: Vec<ComponentSpec>,
    },
    Iidc {
        cardinality: Vec<f64>,
        spatial: Vec<ComponentSpec>,
    },
    MultiBernoulli {
        components: Vec<BernoulliSpec>,
    },
    Glmb {
        components: Vec<GlmbComponentSpec>,
    },
    /// Seeded random multi-Bernoulli: means uniform in `roi`, existence
    /// uniform in `existence_range`, covariance eigenvalues uniform in
    /// `covariance_eigenvalues` with a random rotation.
    RandomMultiBernoulli {
        count: usize,
        roi: FovSpec,
        existence_range: [f64; 2],
        covariance_eigenvalues: [f64; 2],
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum FovSpec {
    Box { lo: Vec<Option<f64>>, hi: Vec<Option<f64>> },
    /// `{x : A x ≤ b}`, one row of `A` per face.
    Polytope {
        #[serde(rename = "A")]
        normals: Vec<Vec<f64>>,
        #[serde(rename = "b")]
        offsets: Vec<f64>,
    },
    Ball { center: Vec<f64>, radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SplitSpec {
    pub w_min: f64,
    pub components: usize,
    pub lambda: f64,
    pub zeta: f64,
    pub grid_points: usize,
    pub max_depth: usize,
}

impl Default for SplitSpec {
    fn default() -> Self {
        let c = SplitConfig::<f64>::default();
        Self {
            w_min: c.w_min,
            components: c.components,
            lambda: c.lambda,
            zeta: c.zeta,
            grid_points: c.grid_points,
            max_depth: c.max_depth,
        }
    }
}

impl SplitSpec {
    pub fn config(&self) -> SplitConfig<f64> {
        SplitConfig {
            w_min: self.w_min,
            components: self.components,
            lambda: self.lambda,
            zeta: self.zeta,
            grid_points: self.grid_points,
            max_depth: self.max_depth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum MassMethodSpec {
    #[default]
    Partition,
    /// Samples per mixture component; seeded from the scenario seed.
    MonteCarlo { samples: usize },
    ExactBoxDiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PmfMethodSpec {
    #[default]
    Dp,
    Exact,
    MonteCarlo { samples: usize },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub resolution: usize,
}

/// Negative-information demo: a constant-velocity object observed by a
/// fixed FoV that reports no detections.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DemoSpec {
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// White-acceleration spectral density.
    #[serde(default)]
    pub process_noise: f64,
    #[serde(default = "default_p_d")]
    pub detection_probability: f64,
    /// Apply the no-detection update; `false` only propagates.
    #[serde(default = "default_true")]
    pub negative_information: bool,
    #[serde(default = "default_prune")]
    pub prune_threshold: f64,
    /// Mahalanobis distance below which components merge.
    #[serde(default = "default_merge")]
    pub merge_threshold: f64,
    /// Samples per component for the reported interior masses.
    #[serde(default = "default_check_samples")]
    pub check_samples: usize,
    pub grid: GridSpec,
}

fn default_steps() -> usize {
    3
}
fn default_dt() -> f64 {
    1.0
}
fn default_p_d() -> f64 {
    1.0
}
fn default_true() -> bool {
    true
}
fn default_prune() -> f64 {
    1e-6
}
fn default_merge() -> f64 {
    0.1
}
fn default_check_samples() -> usize {
    100_000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanSpec {
    /// FoV shape with its reference point at the origin.
    pub fov_template: FovSpec,
    pub roi: FovSpec,
    pub grid_resolution: usize,
    #[serde(default)]
    pub pmf_method: PmfMethodSpec,
    /// Resolution of the exported PHD grid; defaults to `grid_resolution`.
    #[serde(default)]
    pub phd_resolution: Option<usize>,
}

impl Scenario {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let s: Self = serde_json::from_str(text).map_err(|e| CliError::Validation(format!("scenario: {e}")))?;
        if s.version != SCENARIO_VERSION {
            return Err(CliError::Validation(format!(
                "scenario version {} is not supported (expected {SCENARIO_VERSION})",
                s.version
            )));
        }
        Ok(s)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn model(&self) -> CliResult<RfsModel<f64>> {
        let n_p = self.position_dim;
        let model = match &self.model {
            ModelSpec::Density { .. } => {
                return Err(CliError::Validation(
                    "a single-object density is not a multi-object model; use poisson, iidc, multi_bernoulli, glmb or random_multi_bernoulli".into(),
                ))
            }
            ModelSpec::Poisson { intensity } => {
                let m = mixture(intensity, n_p, false)?;
                RfsModel::Poisson(PoissonRfs::new(m))
            }
            ModelSpec::Iidc { cardinality, spatial } => {
                RfsModel::Iidc(IidcRfs::new(cardinality.clone(), mixture(spatial, n_p, true)?)?)
            }
            ModelSpec::MultiBernoulli { components } => {
                let comps = components
                    .iter()
                    .map(|b| {
                        Ok(Bernoulli {
                            existence: b.existence,
                            density: mixture(&b.density, n_p, true)?,
                        })
                    })
                    .collect::<CliResult<_>>()?;
                RfsModel::MultiBernoulli(MultiBernoulli::new(comps)?)
            }
            ModelSpec::Glmb { components } => {
                let mut dim = n_p;
                let comps = components
                    .iter()
                    .map(|c| {
                        let densities = c
                            .densities
                            .iter()
                            .map(|d| mixture(d, n_p, true))
                            .collect::<CliResult<Vec<_>>>()?;
                        if let Some(d) = densities.first() {
                            dim.get_or_insert(d.position_dim());
                        }
                        Ok(GlmbComponent {
                            weight: c.weight,
                            labels: c.labels.clone(),
                            densities,
                        })
                    })
                    .collect::<CliResult<_>>()?;
                let dim = dim.ok_or_else(|| {
                    CliError::Validation("GLMB without densities needs an explicit position_dim".into())
                })?;
                RfsModel::Glmb(GlmbDistribution::new(comps, dim)?)
            }
            ModelSpec::RandomMultiBernoulli {
                count,
                roi,
                existence_range,
                covariance_eigenvalues,
            } => {
                let cov = CovSpec {
                    min_eigenvalue: covariance_eigenvalues[0],
                    max_eigenvalue: covariance_eigenvalues[1],
                };
                let roi = roi.build()?;
                let seed = derive_seed(self.seed, SEED_MODEL);
                RfsModel::MultiBernoulli(sample_mb_scenario(
                    *count,
                    &roi,
                    (existence_range[0], existence_range[1]),
                    &cov,
                    seed,
                )?)
            }
        };
        Ok(model)
    }

    pub fn density(&self) -> CliResult<GaussianMixture<f64>> {
        match &self.model {
            ModelSpec::Density { components } => mixture(components, self.position_dim, true),
            _ => Err(CliError::Validation("expected a model of type \"density\"".into())),
        }
    }

    pub fn fov(&self) -> CliResult<FieldOfView<f64>> {
        self.fov
            .as_ref()
            .ok_or_else(|| CliError::Validation("scenario has no fov".into()))?
            .build()
    }

    pub fn mass_method(&self, library: &Arc<SplitLibrary>) -> CliResult<FovMassMethod<f64>> {
        let m = match self.mass_method {
            MassMethodSpec::Partition => FovMassMethod::PartitionWeights {
                config: self.split.config(),
                library: Arc::clone(library),
            },
            MassMethodSpec::MonteCarlo { samples } => FovMassMethod::MonteCarlo {
                samples,
                seed: derive_seed(self.seed, SEED_MASS),
            },
            MassMethodSpec::ExactBoxDiagonal => FovMassMethod::ExactBoxDiagonal,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn pmf_method(&self, spec: PmfMethodSpec) -> PmfMethod {
        match spec {
            PmfMethodSpec::Dp => PmfMethod::Dp,
            PmfMethodSpec::Exact => PmfMethod::Exact,
            PmfMethodSpec::MonteCarlo { samples } => PmfMethod::MonteCarlo {
                samples,
                seed: derive_seed(self.seed, SEED_PMF),
            },
        }
    }
}

impl FovSpec {
    pub fn build(&self) -> CliResult<FieldOfView<f64>> {
        let fov = match self {
            FovSpec::Box { lo, hi } => FieldOfView::new_box(
                DVector::from_iterator(lo.len(), lo.iter().map(|v| v.unwrap_or(f64::NEG_INFINITY))),
                DVector::from_iterator(hi.len(), hi.iter().map(|v| v.unwrap_or(f64::INFINITY))),
            )?,
            FovSpec::Polytope { normals, offsets } => {
                FieldOfView::new_polytope(rows_to_matrix(normals, "polytope normals")?, DVector::from_vec(offsets.clone()))?
            }
            FovSpec::Ball { center, radius } => FieldOfView::new_ball(DVector::from_vec(center.clone()), *radius)?,
        };
        Ok(fov)
    }
}

fn rows_to_matrix(rows: &[Vec<f64>], what: &str) -> CliResult<DMatrix<f64>> {
    let cols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != cols) {
        return Err(CliError::Validation(format!("{what}: rows have different lengths")));
    }
    Ok(DMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j]))
}

fn mixture(spec: &[ComponentSpec], position_dim: Option<usize>, normalized: bool) -> CliResult<GaussianMixture<f64>> {
    let first = spec
        .first()
        .ok_or_else(|| CliError::Validation("mixture has no components".into()))?;
    let n = first.mean.len();
    let comps = spec
        .iter()
        .map(|c| {
            if c.mean.len() != n {
                return Err(CliError::Validation("mixture components have different dimensions".into()));
            }
            let cov = rows_to_matrix(&c.covariance, "covariance")?;
            Ok(GaussianComponent::new(c.weight, DVector::from_vec(c.mean.clone()), cov)?)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let gm = GaussianMixture::new(comps, n, position_dim.unwrap_or(n))?;
    if normalized && (gm.total_weight() - 1.0).abs() > 1e-9 {
        return Err(CliError::Validation(format!(
            "density weights sum to {}, not 1",
            gm.total_weight()
        )));
    }
    Ok(gm)
}
