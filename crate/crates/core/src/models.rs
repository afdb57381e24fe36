//! Multi-object densities and FoV mass evaluation.
//!
//! Four families are represented: Poisson (an intensity mixture), IIDC (a
//! cardinality pmf plus one spatial density), multi-Bernoulli and GLMB. Every
//! cardinality computation reduces to FoV masses `⟨1_S, p⟩` of normalized
//! mixtures, which [`fov_mass`] evaluates by one of three strategies.

use std::sync::Arc;

use libm::erfc;
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fov::FieldOfView;
use crate::gmix::{GaussianComponent, GaussianMixture};
use crate::partition::{partition, SplitConfig};
use crate::rng;
use crate::scalar::{tol, Real};
use crate::splitlib::SplitLibrary;

/// Largest accepted existence probability. The MB cardinality expression
/// divides by `1 - r`, so certain objects are represented by this value.
pub const MAX_EXISTENCE: f64 = 1.0 - 1e-9;

/// Tolerance on the total weight of densities that must be normalized.
const NORMALIZATION_TOLERANCE: f64 = 1e-9;

pub type Label = u64;

fn check_normalized<T: Real>(p: &GaussianMixture<T>, what: &str) -> Result<()> {
    let total = p.total_weight();
    if (total - T::one()).abs() > tol::<T>(NORMALIZATION_TOLERANCE) {
        return Err(Error::InvalidArgument(format!(
            "{what} must be normalized, total weight is {total}"
        )));
    }
    Ok(())
}

fn check_position_dim<T: Real>(p: &GaussianMixture<T>, expected: usize) -> Result<()> {
    if p.position_dim() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: p.position_dim(),
        });
    }
    Ok(())
}

/// Poisson RFS given by its intensity `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonRfs<T: Real> {
    intensity: GaussianMixture<T>,
    expected_count: T,
}

impl<T: Real> PoissonRfs<T> {
    pub fn new(intensity: GaussianMixture<T>) -> Self {
        let expected_count = intensity.total_weight();
        Self {
            intensity,
            expected_count,
        }
    }

    pub fn intensity(&self) -> &GaussianMixture<T> {
        &self.intensity
    }

    /// Expected total number of objects `N_X`.
    pub fn expected_count(&self) -> T {
        self.expected_count
    }
}

/// IIDC RFS: cardinality pmf `ρ(0..=m_max)` and spatial density `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct IidcRfs<T: Real> {
    cardinality: Vec<T>,
    spatial: GaussianMixture<T>,
}

impl<T: Real> IidcRfs<T> {
    pub fn new(cardinality: Vec<T>, spatial: GaussianMixture<T>) -> Result<Self> {
        if cardinality.is_empty() {
            return Err(Error::InvalidArgument("cardinality pmf is empty".into()));
        }
        if cardinality.iter().any(|p| !(p.is_finite() && *p >= T::zero())) {
            return Err(Error::InvalidArgument("cardinality pmf entries must be finite and non-negative".into()));
        }
        let total = cardinality.iter().fold(T::zero(), |a, &p| a + p);
        if (total - T::one()).abs() > tol::<T>(1e-12) * T::lit(cardinality.len() as f64) {
            return Err(Error::InvalidArgument(format!("cardinality pmf sums to {total}, not 1")));
        }
        check_normalized(&spatial, "IIDC spatial density")?;
        Ok(Self { cardinality, spatial })
    }

    pub fn cardinality(&self) -> &[T] {
        &self.cardinality
    }

    pub fn spatial(&self) -> &GaussianMixture<T> {
        &self.spatial
    }

    pub fn max_cardinality(&self) -> usize {
        self.cardinality.len() - 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bernoulli<T: Real> {
    pub existence: T,
    pub density: GaussianMixture<T>,
}

/// Multi-Bernoulli RFS with `M >= 1` independent components.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiBernoulli<T: Real> {
    components: Vec<Bernoulli<T>>,
}

impl<T: Real> MultiBernoulli<T> {
    pub fn new(components: Vec<Bernoulli<T>>) -> Result<Self> {
        let first = components
            .first()
            .ok_or_else(|| Error::InvalidArgument("multi-Bernoulli needs at least one component".into()))?;
        let n_p = first.density.position_dim();
        for (i, b) in components.iter().enumerate() {
            let r = b.existence;
            if !(r >= T::zero()) || r >= T::one() {
                return Err(Error::InvalidArgument(format!(
                    "existence probability of component {i} is {r}; it must lie in [0, 1), \
                     use {MAX_EXISTENCE} for a certain object"
                )));
            }
            check_normalized(&b.density, "Bernoulli density")?;
            check_position_dim(&b.density, n_p)?;
        }
        Ok(Self { components })
    }

    pub fn components(&self) -> &[Bernoulli<T>] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn position_dim(&self) -> usize {
        self.components[0].density.position_dim()
    }

    pub fn existence(&self) -> Vec<T> {
        self.components.iter().map(|b| b.existence).collect()
    }
}

/// One term of a GLMB density: weight, label set and per-label densities.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmbComponent<T: Real> {
    pub weight: T,
    pub labels: Vec<Label>,
    pub densities: Vec<GaussianMixture<T>>,
}

/// GLMB density with the association histories flattened into a list.
#[derive(Debug, Clone, PartialEq)]
pub struct GlmbDistribution<T: Real> {
    components: Vec<GlmbComponent<T>>,
    position_dim: usize,
}

impl<T: Real> GlmbDistribution<T> {
    pub fn new(components: Vec<GlmbComponent<T>>, position_dim: usize) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidArgument("GLMB needs at least one component".into()));
        }
        let mut total = T::zero();
        for (i, c) in components.iter().enumerate() {
            if !(c.weight.is_finite() && c.weight >= T::zero()) {
                return Err(Error::InvalidArgument(format!("GLMB component {i} has weight {}", c.weight)));
            }
            if c.labels.len() != c.densities.len() {
                return Err(Error::DimensionMismatch {
                    expected: c.labels.len(),
                    got: c.densities.len(),
                });
            }
            let mut sorted = c.labels.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidArgument(format!("GLMB component {i} repeats a label")));
            }
            for p in &c.densities {
                check_normalized(p, "GLMB label density")?;
                check_position_dim(p, position_dim)?;
            }
            total += c.weight;
        }
        if (total - T::one()).abs() > tol::<T>(1e-9) {
            return Err(Error::InvalidArgument(format!("GLMB weights sum to {total}, not 1")));
        }
        Ok(Self {
            components,
            position_dim,
        })
    }

    pub fn components(&self) -> &[GlmbComponent<T>] {
        &self.components
    }

    pub fn position_dim(&self) -> usize {
        self.position_dim
    }

    /// Largest label set size.
    pub fn max_labels(&self) -> usize {
        self.components.iter().map(|c| c.labels.len()).max().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum RfsModel<T: Real> {
    Poisson(PoissonRfs<T>),
    Iidc(IidcRfs<T>),
    MultiBernoulli(MultiBernoulli<T>),
    Glmb(GlmbDistribution<T>),
}

impl<T: Real> RfsModel<T> {
    pub fn family(&self) -> &'static str {
        match self {
            Self::Poisson(_) => "poisson",
            Self::Iidc(_) => "iidc",
            Self::MultiBernoulli(_) => "multi_bernoulli",
            Self::Glmb(_) => "glmb",
        }
    }

    pub fn position_dim(&self) -> usize {
        match self {
            Self::Poisson(m) => m.intensity().position_dim(),
            Self::Iidc(m) => m.spatial().position_dim(),
            Self::MultiBernoulli(m) => m.position_dim(),
            Self::Glmb(m) => m.position_dim(),
        }
    }

    /// Probability hypothesis density of the model.
    pub fn phd(&self) -> Result<GaussianMixture<T>> {
        match self {
            Self::Poisson(m) => Ok(m.intensity().clone()),
            Self::Iidc(m) => {
                let mean = m
                    .cardinality()
                    .iter()
                    .enumerate()
                    .fold(T::zero(), |a, (n, &p)| a + T::lit(n as f64) * p);
                Ok(m.spatial().scaled(mean))
            }
            Self::MultiBernoulli(m) => Ok(phd_of_mb(m)),
            Self::Glmb(m) => {
                let mut out = Vec::new();
                let mut dims = None;
                for c in m.components() {
                    for p in &c.densities {
                        dims.get_or_insert((p.state_dim(), p.position_dim()));
                        out.extend(p.scaled(c.weight).into_components());
                    }
                }
                let (n, n_p) = dims.unwrap_or((m.position_dim(), m.position_dim()));
                GaussianMixture::new(out, n, n_p)
            }
        }
    }
}

/// `D = Σ r^(i) p^(i)`.
pub fn phd_of_mb<T: Real>(mb: &MultiBernoulli<T>) -> GaussianMixture<T> {
    let first = &mb.components()[0].density;
    let components = mb
        .components()
        .iter()
        .flat_map(|b| b.density.scaled(b.existence).into_components())
        .collect();
    first.with_components(components)
}

/// How `⟨1_S, p⟩` is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum FovMassMethod<T: Real> {
    /// Split along the FoV boundary and sum the weights of inside components.
    PartitionWeights {
        config: SplitConfig<T>,
        library: Arc<SplitLibrary>,
    },
    /// Sample `samples` positions from every mixture component.
    MonteCarlo { samples: usize, seed: u64 },
    /// Products of normal CDF differences. Requires an axis-aligned box FoV
    /// and diagonal position covariances.
    ExactBoxDiagonal,
}

impl<T: Real> FovMassMethod<T> {
    pub fn partition_default() -> Self {
        Self::PartitionWeights {
            config: SplitConfig::default(),
            library: Arc::new(SplitLibrary::builtin().clone()),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::PartitionWeights { config, .. } => config.validate(),
            Self::MonteCarlo { samples, .. } if *samples == 0 => {
                Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PartitionWeights { .. } => "partition_weights",
            Self::MonteCarlo { .. } => "monte_carlo",
            Self::ExactBoxDiagonal => "exact_box_diagonal",
        }
    }
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * erfc(-x / std::f64::consts::SQRT_2)
    }
}

/// `Φ(b) - Φ(a)` for `a <= b`, using upper tails when both are positive.
fn normal_interval(a: f64, b: f64) -> f64 {
    if a > 0.0 {
        normal_cdf(-a) - normal_cdf(-b)
    } else {
        normal_cdf(b) - normal_cdf(a)
    }
}

fn exact_component_mass<T: Real>(c: &GaussianComponent<T>, n_p: usize, lo: &DVector<T>, hi: &DVector<T>) -> Result<f64> {
    let cov = c.covariance();
    for i in 0..n_p {
        for j in 0..n_p {
            if i != j {
                let scale = (cov[(i, i)] * cov[(j, j)]).sqrt();
                if cov[(i, j)].abs() > scale * T::lit(1e-12) {
                    return Err(Error::MethodMismatch {
                        method: "exact_box_diagonal",
                        reason: "position covariance is not diagonal".into(),
                    });
                }
            }
        }
    }
    let mut mass = 1.0;
    for i in 0..n_p {
        let m = c.mean()[i].as_f64();
        let s = cov[(i, i)].as_f64().sqrt();
        mass *= normal_interval((lo[i].as_f64() - m) / s, (hi[i].as_f64() - m) / s);
    }
    Ok(mass)
}

/// Position samples drawn once per mixture component and reused for any
/// number of FoVs. Component `j` uses stream `j` of the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloDraws<T: Real> {
    weights: Vec<T>,
    /// Per component, `samples * dim` coordinates, sample-major.
    positions: Vec<Vec<T>>,
    /// Per component, the bounding box of its samples.
    bounds: Vec<(Vec<T>, Vec<T>)>,
    samples: usize,
    dim: usize,
}

impl<T: Real> MonteCarloDraws<T> {
    pub fn draw(p: &GaussianMixture<T>, samples: usize, seed: u64) -> Result<Self> {
        if samples == 0 {
            return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
        }
        let dim = p.position_dim();
        let positions = p
            .components()
            .par_iter()
            .enumerate()
            .map(|(j, c)| {
                let marginal = c.position_marginal(dim);
                let sampler = marginal.sampler()?;
                let mut gen = rng::stream(seed, j as u64);
                let mut out = Vec::with_capacity(samples * dim);
                for _ in 0..samples {
                    out.extend(sampler.sample(&mut gen).iter().copied());
                }
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()?;
        let bounds = positions
            .iter()
            .map(|pts: &Vec<T>| {
                let mut lo = vec![T::infinity(); dim];
                let mut hi = vec![-T::infinity(); dim];
                for x in pts.chunks_exact(dim) {
                    for i in 0..dim {
                        lo[i] = lo[i].min(x[i]);
                        hi[i] = hi[i].max(x[i]);
                    }
                }
                (lo, hi)
            })
            .collect();
        Ok(Self {
            weights: p.components().iter().map(|c| c.weight()).collect(),
            positions,
            bounds,
            samples,
            dim,
        })
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    /// Fraction of each component's samples inside `fov`.
    pub fn component_fractions(&self, fov: &FieldOfView<T>) -> Result<Vec<T>> {
        fov.check_dim(self.dim)?;
        Ok(self
            .positions
            .iter()
            .zip(&self.bounds)
            .map(|(pts, (blo, bhi))| {
                // Box FoVs can often be decided from the sample bounds alone.
                if let FieldOfView::Box { lo, hi } = fov {
                    if (0..self.dim).any(|i| bhi[i] < lo[i] || blo[i] > hi[i]) {
                        return T::zero();
                    }
                    if (0..self.dim).all(|i| blo[i] >= lo[i] && bhi[i] <= hi[i]) {
                        return T::one();
                    }
                }
                let hits = pts
                    .chunks_exact(self.dim)
                    .filter(|x| fov.contains_unchecked(x.iter().copied()))
                    .count();
                T::lit(hits as f64 / self.samples as f64)
            })
            .collect())
    }

    pub fn mass(&self, fov: &FieldOfView<T>) -> Result<T> {
        Ok(self
            .component_fractions(fov)?
            .into_iter()
            .zip(&self.weights)
            .fold(T::zero(), |a, (f, &w)| a + w * f))
    }
}

/// A mixture made ready for repeated FoV mass queries. Monte Carlo samples
/// are drawn once at construction.
#[derive(Debug, Clone)]
pub enum PreparedMass<T: Real> {
    Partition {
        mixture: GaussianMixture<T>,
        config: SplitConfig<T>,
        library: Arc<SplitLibrary>,
    },
    MonteCarlo(MonteCarloDraws<T>),
    Exact(GaussianMixture<T>),
}

impl<T: Real> PreparedMass<T> {
    pub fn new(p: &GaussianMixture<T>, method: &FovMassMethod<T>) -> Result<Self> {
        Self::with_seed_offset(p, method, None)
    }

    /// Like [`PreparedMass::new`], but Monte Carlo draws use a seed derived
    /// from the method seed and `index`, so the mixtures of a model get
    /// unrelated samples.
    pub fn indexed(p: &GaussianMixture<T>, method: &FovMassMethod<T>, index: u64) -> Result<Self> {
        Self::with_seed_offset(p, method, Some(index))
    }

    fn with_seed_offset(p: &GaussianMixture<T>, method: &FovMassMethod<T>, index: Option<u64>) -> Result<Self> {
        method.validate()?;
        Ok(match method {
            FovMassMethod::PartitionWeights { config, library } => Self::Partition {
                mixture: p.clone(),
                config: *config,
                library: Arc::clone(library),
            },
            FovMassMethod::MonteCarlo { samples, seed } => {
                let seed = index.map_or(*seed, |i| rng::derive_seed(*seed, i));
                Self::MonteCarlo(MonteCarloDraws::draw(p, *samples, seed)?)
            }
            FovMassMethod::ExactBoxDiagonal => Self::Exact(p.clone()),
        })
    }

    /// Weighted mass `Σ w_j ⟨1_S, N_j⟩`, clamped to `[0, Σ w_j]`.
    pub fn mass(&self, fov: &FieldOfView<T>) -> Result<T> {
        let (mass, total) = match self {
            Self::Partition {
                mixture,
                config,
                library,
            } => {
                fov.check_dim(mixture.position_dim())?;
                if mixture.is_empty() {
                    return Ok(T::zero());
                }
                let part = partition(mixture, fov, config, library)?;
                (part.diagnostics.mass_inside, mixture.total_weight())
            }
            Self::MonteCarlo(draws) => (draws.mass(fov)?, draws.weights.iter().fold(T::zero(), |a, &w| a + w)),
            Self::Exact(mixture) => {
                let FieldOfView::Box { lo, hi } = fov else {
                    return Err(Error::MethodMismatch {
                        method: "exact_box_diagonal",
                        reason: "the FoV is not an axis-aligned box".into(),
                    });
                };
                let n_p = mixture.position_dim();
                fov.check_dim(n_p)?;
                let mut mass = 0.0;
                for c in mixture.components() {
                    mass += c.weight().as_f64() * exact_component_mass(c, n_p, lo, hi)?;
                }
                (T::lit(mass), mixture.total_weight())
            }
        };
        Ok(mass.max(T::zero()).min(total))
    }
}

/// `⟨1_S, p⟩`. For an unnormalized mixture such as an intensity this is the
/// weighted mass `Σ w_j ⟨1_S, N_j⟩`.
pub fn fov_mass<T: Real>(p: &GaussianMixture<T>, fov: &FieldOfView<T>, method: &FovMassMethod<T>) -> Result<T> {
    PreparedMass::new(p, method)?.mass(fov)
}

/// Eigenvalue range of sampled covariances; eigenvectors are a uniformly
/// random rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovSpec<T: Real> {
    pub min_eigenvalue: T,
    pub max_eigenvalue: T,
}

impl<T: Real> CovSpec<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_eigenvalue > T::zero() && self.min_eigenvalue <= self.max_eigenvalue && self.max_eigenvalue.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "covariance eigenvalue range [{}, {}] is invalid",
                self.min_eigenvalue, self.max_eigenvalue
            )));
        }
        Ok(())
    }
}

/// Haar-distributed orthogonal matrix: QR of a Gaussian matrix with the
/// signs of `R`'s diagonal moved into `Q`.
fn random_rotation<R: Rng>(dim: usize, gen: &mut R) -> DMatrix<f64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gen.sample::<f64, _>(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random multi-Bernoulli with one Gaussian per component: means uniform in
/// the box `roi`, existence uniform in `r_range` (values of 1 are clamped to
/// [`MAX_EXISTENCE`]) and covariances drawn per `cov`. Deterministic in
/// `seed`.
pub fn sample_mb_scenario<T: Real>(
    count: usize,
    roi: &FieldOfView<T>,
    r_range: (T, T),
    cov: &CovSpec<T>,
    seed: u64,
) -> Result<MultiBernoulli<T>> {
    if count == 0 {
        return Err(Error::InvalidArgument("scenario needs at least one component".into()));
    }
    let FieldOfView::Box { lo, hi } = roi else {
        return Err(Error::InvalidArgument("region of interest must be a box".into()));
    };
    if lo.iter().chain(hi.iter()).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("region of interest must be bounded".into()));
    }
    let (r_lo, r_hi) = (r_range.0.as_f64(), r_range.1.as_f64());
    if !(0.0 <= r_lo && r_lo <= r_hi && r_hi <= 1.0) {
        return Err(Error::InvalidArgument(format!("existence range [{r_lo}, {r_hi}] is invalid")));
    }
    cov.validate()?;
    let (e_lo, e_hi) = (cov.min_eigenvalue.as_f64(), cov.max_eigenvalue.as_f64());
    let dim = lo.len();
    let mut gen = rng::stream(seed, 0);
    let mut components = Vec::with_capacity(count);
    for _ in 0..count {
        let mean = DVector::from_fn(dim, |i, _| {
            let (a, b) = (lo[i].as_f64(), hi[i].as_f64());
            T::lit(if a < b { gen.random_range(a..=b) } else { a })
        });
        let r: f64 = if r_lo < r_hi { gen.random_range(r_lo..=r_hi) } else { r_lo };
        let eig = DVector::from_fn(dim, |_, _| if e_lo < e_hi { gen.random_range(e_lo..=e_hi) } else { e_lo });
        let q = random_rotation(dim, &mut gen);
        let p = &q * DMatrix::from_diagonal(&eig) * q.transpose();
        let p = (&p + p.transpose()) * 0.5;
        let c = GaussianComponent::new(T::one(), mean, p.map(T::lit))?;
        components.push(Bernoulli {
            existence: T::lit(r.min(MAX_EXISTENCE)),
            density: GaussianMixture::single(c, dim)?,
        });
    }
    MultiBernoulli::new(components)
}
