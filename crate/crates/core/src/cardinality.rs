//! Distribution of the number of objects inside a FoV.
//!
//! Each family reduces to a few FoV masses ([`MassSummary`]): the intensity
//! mass `μ = ⟨1_S, D⟩` for Poisson, the spatial mass `q` for IIDC, the
//! per-component masses `q_i` for multi-Bernoulli and per-label masses for
//! GLMB. The pmf is then a closed form in those numbers. Pmf arithmetic is
//! carried out in `f64` regardless of the scalar type of the model.
//!
//! The Poisson FoV pmf
//!
//! ```text
//! ρ_S(n) = Σ_{m≥n} e^{-N_X} μ^n ν^{m-n} / (n! (m-n)!),   ν = N_X - μ
//! ```
//!
//! collapses to `Poisson(μ)` because the inner sum over `m - n` is `e^ν`. Both
//! forms are evaluated and compared on every call; the collapsed one is
//! returned.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fov::FieldOfView;
use crate::models::{
    FovMassMethod, GlmbDistribution, IidcRfs, MultiBernoulli, PoissonRfs, PreparedMass, RfsModel,
};
use crate::rng;
use crate::scalar::Real;

/// Largest MB size accepted by [`mb_pmf_exact`].
pub const MAX_EXACT_COMPONENTS: usize = 14;

/// Largest deviation tolerated between the two Poisson forms.
pub const POISSON_COLLAPSE_TOLERANCE: f64 = 1e-10;

/// IIDC binomial coefficients are formed in log space above this `m`.
const LOG_BINOMIAL_THRESHOLD: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PmfKind {
    Poisson,
    Iidc,
    MultiBernoulliExact,
    MultiBernoulliDp,
    MultiBernoulliMonteCarlo,
    Glmb,
}

impl PmfKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Poisson => "poisson",
            Self::Iidc => "iidc",
            Self::MultiBernoulliExact => "multi_bernoulli_exact",
            Self::MultiBernoulliDp => "multi_bernoulli_dp",
            Self::MultiBernoulliMonteCarlo => "multi_bernoulli_monte_carlo",
            Self::Glmb => "glmb",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Truncation {
    /// Largest count represented; the pmf has `n_max + 1` entries.
    pub n_max: usize,
    /// Upper limit of the global cardinality sum, where one is truncated.
    pub m_max: Option<usize>,
    /// Monte Carlo trials, for sampled pmfs.
    pub samples: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CardinalityPmf<T: Real> {
    probs: Vec<T>,
    kind: PmfKind,
    truncation: Truncation,
}

impl<T: Real> CardinalityPmf<T> {
    fn from_f64(probs: Vec<f64>, kind: PmfKind, truncation: Truncation) -> Self {
        Self {
            probs: probs.into_iter().map(T::lit).collect(),
            kind,
            truncation,
        }
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn into_probs(self) -> Vec<T> {
        self.probs
    }

    pub fn kind(&self) -> PmfKind {
        self.kind
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    /// `ρ_S(n)`, zero beyond the truncation.
    pub fn prob(&self, n: usize) -> T {
        self.probs.get(n).copied().unwrap_or_else(T::zero)
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |a, &p| a + p)
    }

    pub fn moments(&self) -> (T, T) {
        pmf_moments(self)
    }
}

/// `E[n]` and `Var[n]` of a finite pmf.
pub fn pmf_moments<T: Real>(pmf: &CardinalityPmf<T>) -> (T, T) {
    let mean = pmf
        .probs
        .iter()
        .enumerate()
        .fold(T::zero(), |a, (n, &p)| a + T::lit(n as f64) * p);
    let var = pmf.probs.iter().enumerate().fold(T::zero(), |a, (n, &p)| {
        let d = T::lit(n as f64) - mean;
        a + d * d * p
    });
    (mean, var)
}

/// Probability that the FoV is empty, `ρ_S(0)`.
pub fn void_probability<T: Real>(pmf: &CardinalityPmf<T>) -> T {
    pmf.probs[0]
}

/// `ln k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `k ln x` with `0^0 = 1`.
fn ln_pow(x: f64, k: usize) -> f64 {
    if k == 0 {
        0.0
    } else if x == 0.0 {
        f64::NEG_INFINITY
    } else {
        k as f64 * x.ln()
    }
}

fn check_probability(p: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("{what} must lie in [0, 1], got {p}")));
    }
    Ok(())
}

/// Default count truncation for a Poisson FoV pmf with rate `mu`.
pub fn poisson_n_max(mu: f64) -> usize {
    (mu + 10.0 * mu.sqrt() + 20.0).ceil() as usize
}

/// Global cardinality truncation for the double sum: the omitted tail of
/// `Poisson(ν)` beyond `m_max - n_max` is far below `1e-12`.
pub fn poisson_m_max(n_max: usize, outside: f64) -> usize {
    n_max + (outside + 15.0 * outside.sqrt() + 40.0).ceil() as usize
}

fn poisson_rates(inside: f64, total: f64) -> Result<(f64, f64)> {
    if !(inside.is_finite() && inside >= 0.0 && total.is_finite()) {
        return Err(Error::InvalidArgument(format!("Poisson rates must be finite and non-negative, got {inside}, {total}")));
    }
    Ok((inside, (total - inside).max(0.0)))
}

/// Truncated double sum for the Poisson FoV pmf, kept for audit.
pub fn poisson_double_sum(inside: f64, total: f64, n_max: usize, m_max: usize) -> Result<Vec<f64>> {
    let (mu, nu) = poisson_rates(inside, total)?;
    let n_total = mu + nu;
    let lf = ln_factorials(m_max);
    Ok((0..=n_max)
        .map(|n| {
            (n..=m_max)
                .map(|m| {
                    let k = m - n;
                    (-n_total + ln_pow(mu, n) + ln_pow(nu, k) - lf[n] - lf[k]).exp()
                })
                .sum()
        })
        .collect())
}

/// `Poisson(μ)` pmf on `0..=n_max`, in log space.
pub fn poisson_pmf(mu: f64, n_max: usize) -> Vec<f64> {
    let lf = ln_factorials(n_max);
    (0..=n_max).map(|n| (-mu + ln_pow(mu, n) - lf[n]).exp()).collect()
}

/// FoV pmf of a Poisson RFS with `μ = inside` expected objects in the FoV
/// out of `total`.
pub fn poisson_pmf_from_mass<T: Real>(inside: f64, total: f64) -> Result<CardinalityPmf<T>> {
    let (mu, nu) = poisson_rates(inside, total)?;
    let n_max = poisson_n_max(mu);
    let m_max = poisson_m_max(n_max, nu);
    let collapsed = poisson_pmf(mu, n_max);
    let audit = poisson_double_sum(mu, mu + nu, n_max, m_max)?;
    let deviation = collapsed
        .iter()
        .zip(&audit)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    if deviation > POISSON_COLLAPSE_TOLERANCE {
        return Err(Error::Numerical(format!(
            "Poisson double sum deviates from its collapsed form by {deviation:e}"
        )));
    }
    Ok(CardinalityPmf::from_f64(
        collapsed,
        PmfKind::Poisson,
        Truncation {
            n_max,
            m_max: Some(m_max),
            samples: None,
        },
    ))
}

/// `Binomial(m, q)` pmf on `0..=m`.
pub fn binomial_pmf(m: usize, q: f64) -> Vec<f64> {
    if q == 0.0 || q == 1.0 {
        let mut out = vec![0.0; m + 1];
        out[if q == 0.0 { 0 } else { m }] = 1.0;
        return out;
    }
    if m <= LOG_BINOMIAL_THRESHOLD {
        let mut c: u64 = 1;
        let mut out = Vec::with_capacity(m + 1);
        for n in 0..=m {
            out.push(c as f64 * q.powi(n as i32) * (1.0 - q).powi((m - n) as i32));
            c = c * (m - n) as u64 / (n + 1) as u64;
        }
        return out;
    }
    let lf = ln_factorials(m);
    let (lq, lp) = (q.ln(), (-q).ln_1p());
    (0..=m)
        .map(|n| (lf[m] - lf[n] - lf[m - n] + n as f64 * lq + (m - n) as f64 * lp).exp())
        .collect()
}

/// FoV pmf of an IIDC RFS with cardinality pmf `rho` and spatial mass `q`.
pub fn iidc_pmf_from_mass<T: Real>(rho: &[f64], q: f64) -> Result<CardinalityPmf<T>> {
    check_probability(q, "spatial FoV mass")?;
    if rho.is_empty() {
        return Err(Error::InvalidArgument("cardinality pmf is empty".into()));
    }
    let m_max = rho.len() - 1;
    let mut out = vec![0.0; m_max + 1];
    for (m, &rm) in rho.iter().enumerate() {
        if rm == 0.0 {
            continue;
        }
        for (n, b) in binomial_pmf(m, q).into_iter().enumerate() {
            out[n] += rm * b;
        }
    }
    Ok(CardinalityPmf::from_f64(
        out,
        PmfKind::Iidc,
        Truncation {
            n_max: m_max,
            m_max: Some(m_max),
            samples: None,
        },
    ))
}

/// Distribution of the number of successes of independent Bernoulli trials.
pub fn poisson_binomial(probs: &[f64]) -> Vec<f64> {
    let mut pmf = vec![0.0; probs.len() + 1];
    pmf[0] = 1.0;
    for (i, &p) in probs.iter().enumerate() {
        for n in (1..=i + 1).rev() {
            pmf[n] = pmf[n] * (1.0 - p) + pmf[n - 1] * p;
        }
        pmf[0] *= 1.0 - p;
    }
    pmf
}

fn check_mb_inputs(existence: &[f64], mass: &[f64]) -> Result<()> {
    if existence.len() != mass.len() {
        return Err(Error::DimensionMismatch {
            expected: existence.len(),
            got: mass.len(),
        });
    }
    for (&r, &q) in existence.iter().zip(mass) {
        check_probability(q, "FoV mass")?;
        check_probability(r, "existence probability")?;
    }
    Ok(())
}

fn mb_truncation(m: usize) -> Truncation {
    Truncation {
        n_max: m,
        m_max: Some(m),
        samples: None,
    }
}

/// Multi-Bernoulli FoV pmf by enumerating every split of the components into
/// existing-inside, existing-outside and non-existing sets:
///
/// ```text
/// ρ_S(n) = Π(1-r) Σ_{I1⊎I2⊎I3, |I1|=n} Π_{I1} r q/(1-r) Π_{I2} r(1-q)/(1-r)
/// ```
///
/// Cost is `3^M`; this is the reference for [`mb_pmf_dp`].
pub fn mb_pmf_exact<T: Real>(existence: &[f64], mass: &[f64]) -> Result<CardinalityPmf<T>> {
    check_mb_inputs(existence, mass)?;
    if let Some(r) = existence.iter().find(|&&r| r >= 1.0) {
        return Err(Error::InvalidArgument(format!("enumeration divides by 1 - r; existence {r} is not below 1")));
    }
    let m = existence.len();
    if m > MAX_EXACT_COMPONENTS {
        return Err(Error::TooLarge {
            m,
            max: MAX_EXACT_COMPONENTS,
        });
    }
    let prefactor: f64 = existence.iter().map(|r| 1.0 - r).product();
    let inside: Vec<f64> = existence.iter().zip(mass).map(|(r, q)| r * q / (1.0 - r)).collect();
    let outside: Vec<f64> = existence.iter().zip(mass).map(|(r, q)| r * (1.0 - q) / (1.0 - r)).collect();

    fn walk(i: usize, n: usize, term: f64, inside: &[f64], outside: &[f64], acc: &mut [f64]) {
        if i == inside.len() {
            acc[n] += term;
            return;
        }
        walk(i + 1, n + 1, term * inside[i], inside, outside, acc);
        walk(i + 1, n, term * outside[i], inside, outside, acc);
        walk(i + 1, n, term, inside, outside, acc);
    }

    let mut acc = vec![0.0; m + 1];
    walk(0, 0, 1.0, &inside, &outside, &mut acc);
    let probs = acc.into_iter().map(|s| prefactor * s).collect();
    Ok(CardinalityPmf::from_f64(probs, PmfKind::MultiBernoulliExact, mb_truncation(m)))
}

/// Multi-Bernoulli FoV pmf as the Poisson-binomial distribution of
/// `r_S^(i) = r^(i) q_i`, by an `O(M^2)` convolution.
pub fn mb_pmf_dp<T: Real>(existence: &[f64], mass: &[f64]) -> Result<CardinalityPmf<T>> {
    check_mb_inputs(existence, mass)?;
    let r_s: Vec<f64> = existence.iter().zip(mass).map(|(r, q)| r * q).collect();
    Ok(CardinalityPmf::from_f64(
        poisson_binomial(&r_s),
        PmfKind::MultiBernoulliDp,
        mb_truncation(existence.len()),
    ))
}

/// Stochastic multi-Bernoulli FoV pmf: `samples` trials in which object `i`
/// is counted when `r_S^(i) >= u` for `u ~ Uniform(0, 1]`. Trials are drawn
/// in blocks of [`rng::BLOCK`], block `b` from stream `b` of `seed`.
pub fn mb_pmf_monte_carlo<T: Real>(existence: &[f64], mass: &[f64], samples: usize, seed: u64) -> Result<CardinalityPmf<T>> {
    check_mb_inputs(existence, mass)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one trial".into()));
    }
    let m = existence.len();
    let r_s: Vec<f64> = existence.iter().zip(mass).map(|(r, q)| r * q).collect();
    let blocks = samples.div_ceil(rng::BLOCK);
    let tallies: Vec<Vec<u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut gen = rng::stream(seed, b as u64);
            let trials = rng::BLOCK.min(samples - b * rng::BLOCK);
            let mut tally = vec![0u64; m + 1];
            for _ in 0..trials {
                let mut n = 0;
                for &p in &r_s {
                    let u = 1.0 - gen.random::<f64>();
                    if p >= u {
                        n += 1;
                    }
                }
                tally[n] += 1;
            }
            tally
        })
        .collect();
    let mut counts = vec![0u64; m + 1];
    for tally in &tallies {
        for (c, t) in counts.iter_mut().zip(tally) {
            *c += t;
        }
    }
    let probs = counts.into_iter().map(|c| c as f64 / samples as f64).collect();
    Ok(CardinalityPmf::from_f64(
        probs,
        PmfKind::MultiBernoulliMonteCarlo,
        Truncation {
            n_max: m,
            m_max: Some(m),
            samples: Some(samples),
        },
    ))
}

/// GLMB FoV pmf: per component, the Poisson-binomial distribution of its
/// label masses, mixed by component weight.
pub fn glmb_pmf_from_masses<T: Real>(components: &[(f64, Vec<f64>)]) -> Result<CardinalityPmf<T>> {
    let n_max = components.iter().map(|(_, q)| q.len()).max().unwrap_or(0);
    let mut out = vec![0.0; n_max + 1];
    for (w, qs) in components {
        for &q in qs {
            check_probability(q, "label FoV mass")?;
        }
        for (n, p) in poisson_binomial(qs).into_iter().enumerate() {
            out[n] += w * p;
        }
    }
    Ok(CardinalityPmf::from_f64(
        out,
        PmfKind::Glmb,
        Truncation {
            n_max,
            m_max: Some(n_max),
            samples: None,
        },
    ))
}

/// The FoV masses a family's pmf depends on.
#[derive(Debug, Clone, PartialEq)]
pub enum MassSummary {
    Poisson { inside: f64, total: f64 },
    Iidc { cardinality: Vec<f64>, mass: f64 },
    MultiBernoulli { existence: Vec<f64>, mass: Vec<f64> },
    Glmb { components: Vec<(f64, Vec<f64>)> },
}

impl MassSummary {
    /// Replaces the FoV indicator by `p_d` times it, which turns the FoV
    /// pmf into the pmf of the number of detections.
    pub fn thinned(&self, p_d: f64) -> Result<Self> {
        check_probability(p_d, "detection probability")?;
        Ok(match self {
            Self::Poisson { inside, total } => Self::Poisson {
                inside: inside * p_d,
                total: *total,
            },
            Self::Iidc { cardinality, mass } => Self::Iidc {
                cardinality: cardinality.clone(),
                mass: mass * p_d,
            },
            Self::MultiBernoulli { existence, mass } => Self::MultiBernoulli {
                existence: existence.clone(),
                mass: mass.iter().map(|q| q * p_d).collect(),
            },
            Self::Glmb { components } => Self::Glmb {
                components: components
                    .iter()
                    .map(|(w, qs)| (*w, qs.iter().map(|q| q * p_d).collect()))
                    .collect(),
            },
        })
    }
}

/// Which multi-Bernoulli evaluation to use. Other families have a single
/// deterministic formula and accept `Dp` or `Exact`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PmfMethod {
    #[default]
    Dp,
    Exact,
    MonteCarlo {
        samples: usize,
        seed: u64,
    },
}

impl PmfMethod {
    pub fn name(self) -> &'static str {
        match self {
            Self::Dp => "dp",
            Self::Exact => "exact",
            Self::MonteCarlo { .. } => "mc",
        }
    }
}

pub fn pmf_from_masses<T: Real>(summary: &MassSummary, method: PmfMethod) -> Result<CardinalityPmf<T>> {
    let non_mb = |family: &str| -> Result<()> {
        if let PmfMethod::MonteCarlo { .. } = method {
            return Err(Error::MethodMismatch {
                method: "mc",
                reason: format!("sampled pmfs are only available for multi-Bernoulli models, not {family}"),
            });
        }
        Ok(())
    };
    match summary {
        MassSummary::Poisson { inside, total } => {
            non_mb("poisson")?;
            poisson_pmf_from_mass(*inside, *total)
        }
        MassSummary::Iidc { cardinality, mass } => {
            non_mb("iidc")?;
            iidc_pmf_from_mass(cardinality, *mass)
        }
        MassSummary::MultiBernoulli { existence, mass } => match method {
            PmfMethod::Dp => mb_pmf_dp(existence, mass),
            PmfMethod::Exact => mb_pmf_exact(existence, mass),
            PmfMethod::MonteCarlo { samples, seed } => mb_pmf_monte_carlo(existence, mass, samples, seed),
        },
        MassSummary::Glmb { components } => {
            non_mb("glmb")?;
            glmb_pmf_from_masses(components)
        }
    }
}

/// A model with every density prepared for repeated FoV mass queries.
#[derive(Debug, Clone)]
pub struct PreparedModel<T: Real> {
    model: RfsModel<T>,
    masses: Vec<PreparedMass<T>>,
}

impl<T: Real> PreparedModel<T> {
    pub fn new(model: &RfsModel<T>, method: &FovMassMethod<T>) -> Result<Self> {
        let masses = match model {
            RfsModel::Poisson(m) => vec![PreparedMass::new(m.intensity(), method)?],
            RfsModel::Iidc(m) => vec![PreparedMass::new(m.spatial(), method)?],
            RfsModel::MultiBernoulli(m) => m
                .components()
                .iter()
                .enumerate()
                .map(|(i, b)| PreparedMass::indexed(&b.density, method, i as u64))
                .collect::<Result<_>>()?,
            RfsModel::Glmb(m) => m
                .components()
                .iter()
                .flat_map(|c| c.densities.iter())
                .enumerate()
                .map(|(i, p)| PreparedMass::indexed(p, method, i as u64))
                .collect::<Result<_>>()?,
        };
        Ok(Self {
            model: model.clone(),
            masses,
        })
    }

    pub fn model(&self) -> &RfsModel<T> {
        &self.model
    }

    pub fn summarize(&self, fov: &FieldOfView<T>) -> Result<MassSummary> {
        fov.check_dim(self.model.position_dim())?;
        let q: Vec<f64> = self
            .masses
            .par_iter()
            .map(|p| p.mass(fov).map(|m| m.as_f64()))
            .collect::<Result<_>>()?;
        Ok(match &self.model {
            RfsModel::Poisson(m) => MassSummary::Poisson {
                inside: q[0],
                total: m.expected_count().as_f64(),
            },
            RfsModel::Iidc(m) => MassSummary::Iidc {
                cardinality: m.cardinality().iter().map(|p| p.as_f64()).collect(),
                mass: q[0].min(1.0),
            },
            RfsModel::MultiBernoulli(m) => MassSummary::MultiBernoulli {
                existence: m.existence().iter().map(|r| r.as_f64()).collect(),
                mass: q.iter().map(|v| v.min(1.0)).collect(),
            },
            RfsModel::Glmb(m) => {
                let mut it = q.iter();
                MassSummary::Glmb {
                    components: m
                        .components()
                        .iter()
                        .map(|c| {
                            let qs = it.by_ref().take(c.densities.len()).map(|v| v.min(1.0)).collect();
                            (c.weight.as_f64(), qs)
                        })
                        .collect(),
                }
            }
        })
    }

    pub fn pmf(&self, fov: &FieldOfView<T>, method: PmfMethod) -> Result<CardinalityPmf<T>> {
        pmf_from_masses(&self.summarize(fov)?, method)
    }
}

/// FoV masses of any model.
pub fn mass_summary<T: Real>(model: &RfsModel<T>, fov: &FieldOfView<T>, mass_method: &FovMassMethod<T>) -> Result<MassSummary> {
    PreparedModel::new(model, mass_method)?.summarize(fov)
}

/// FoV cardinality pmf of any model.
pub fn fov_pmf<T: Real>(
    model: &RfsModel<T>,
    fov: &FieldOfView<T>,
    mass_method: &FovMassMethod<T>,
    method: PmfMethod,
) -> Result<CardinalityPmf<T>> {
    pmf_from_masses(&mass_summary(model, fov, mass_method)?, method)
}

pub fn poisson_fov_pmf<T: Real>(m: &PoissonRfs<T>, fov: &FieldOfView<T>, mass_method: &FovMassMethod<T>) -> Result<CardinalityPmf<T>> {
    fov_pmf(&RfsModel::Poisson(m.clone()), fov, mass_method, PmfMethod::Exact)
}

pub fn iidc_fov_pmf<T: Real>(m: &IidcRfs<T>, fov: &FieldOfView<T>, mass_method: &FovMassMethod<T>) -> Result<CardinalityPmf<T>> {
    fov_pmf(&RfsModel::Iidc(m.clone()), fov, mass_method, PmfMethod::Exact)
}

pub fn mb_fov_pmf_exact<T: Real>(m: &MultiBernoulli<T>, fov: &FieldOfView<T>, mass_method: &FovMassMethod<T>) -> Result<CardinalityPmf<T>> {
    if m.len() > MAX_EXACT_COMPONENTS {
        return Err(Error::TooLarge {
            m: m.len(),
            max: MAX_EXACT_COMPONENTS,
        });
    }
    fov_pmf(&RfsModel::MultiBernoulli(m.clone()), fov, mass_method, PmfMethod::Exact)
}

pub fn mb_fov_pmf_dp<T: Real>(m: &MultiBernoulli<T>, fov: &FieldOfView<T>, mass_method: &FovMassMethod<T>) -> Result<CardinalityPmf<T>> {
    fov_pmf(&RfsModel::MultiBernoulli(m.clone()), fov, mass_method, PmfMethod::Dp)
}

pub fn mb_fov_pmf_mc<T: Real>(
    m: &MultiBernoulli<T>,
    fov: &FieldOfView<T>,
    mass_method: &FovMassMethod<T>,
    samples: usize,
    seed: u64,
) -> Result<CardinalityPmf<T>> {
    fov_pmf(
        &RfsModel::MultiBernoulli(m.clone()),
        fov,
        mass_method,
        PmfMethod::MonteCarlo { samples, seed },
    )
}

pub fn glmb_fov_pmf<T: Real>(m: &GlmbDistribution<T>, fov: &FieldOfView<T>, mass_method: &FovMassMethod<T>) -> Result<CardinalityPmf<T>> {
    fov_pmf(&RfsModel::Glmb(m.clone()), fov, mass_method, PmfMethod::Exact)
}

/// Pmf of the number of detections in the FoV for a constant detection
/// probability `p_d` inside it.
pub fn detection_count_pmf<T: Real>(summary: &MassSummary, p_d: f64, method: PmfMethod) -> Result<CardinalityPmf<T>> {
    pmf_from_masses(&summary.thinned(p_d)?, method)
}
