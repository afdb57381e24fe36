//! Gaussian mixtures over an `n`-dimensional state whose first `n_p`
//! elements are position.
//!
//! Besides the containers this module provides the linear algebra the
//! splitting machinery needs (eigendecomposition with a fixed sign
//! convention, position marginals), the closed-form L2 distance between
//! mixtures, and a greedy merge/prune reduction.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::scalar::{tol, Real};

/// Relative tolerance for symmetry and positive-definiteness checks.
pub const SPD_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianComponent<T: Real> {
    weight: T,
    mean: DVector<T>,
    covariance: DMatrix<T>,
}

impl<T: Real> GaussianComponent<T> {
    /// Validates and builds a component. The covariance must be symmetric to
    /// within [`SPD_TOLERANCE`] (relative) and positive definite; it is stored
    /// exactly symmetrized.
    pub fn new(weight: T, mean: DVector<T>, covariance: DMatrix<T>) -> Result<Self> {
        if !(weight >= T::zero()) || !weight.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "component weight must be finite and nonnegative, got {weight}"
            )));
        }
        if !covariance.is_square() || covariance.nrows() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: covariance.nrows(),
            });
        }
        if mean.iter().any(|v| !v.is_finite()) || covariance.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite mean or covariance".into()));
        }
        let covariance = check_symmetric(covariance)?;
        // Rejects non-SPD input; the basis itself is recomputed where needed.
        eigendecompose(&covariance)?;
        Ok(Self {
            weight,
            mean,
            covariance,
        })
    }

    /// Builds a component from parts that are SPD by construction (splits,
    /// merges, propagation). Only symmetrizes.
    pub(crate) fn from_parts(weight: T, mean: DVector<T>, covariance: DMatrix<T>) -> Self {
        let covariance = symmetrize(covariance);
        Self {
            weight,
            mean,
            covariance,
        }
    }

    pub fn weight(&self) -> T {
        self.weight
    }

    pub fn mean(&self) -> &DVector<T> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<T> {
        &self.covariance
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn with_weight(&self, weight: T) -> Self {
        Self {
            weight,
            ..self.clone()
        }
    }

    /// Leading `n_p` block of the mean and covariance; the weight is kept.
    pub fn position_marginal(&self, n_p: usize) -> Self {
        Self {
            weight: self.weight,
            mean: self.mean.rows(0, n_p).into_owned(),
            covariance: self.covariance.view((0, 0), (n_p, n_p)).into_owned(),
        }
    }

    /// Unweighted density `N(x; m, P)`.
    pub fn pdf(&self, x: &DVector<T>) -> T {
        gaussian_pdf(x, &self.mean, &self.covariance).unwrap_or_else(|_| T::zero())
    }

    pub fn sampler(&self) -> Result<GaussianSampler<T>> {
        GaussianSampler::new(self.mean.clone(), &self.covariance)
    }
}

/// Draws from `N(m, P)` through a cached Cholesky factor.
#[derive(Debug, Clone)]
pub struct GaussianSampler<T: Real> {
    mean: DVector<T>,
    factor: DMatrix<T>,
}

impl<T: Real> GaussianSampler<T> {
    pub fn new(mean: DVector<T>, covariance: &DMatrix<T>) -> Result<Self> {
        let chol = Cholesky::new(covariance.clone()).ok_or(Error::NonPositiveDefinite { ratio: 0.0 })?;
        Ok(Self {
            mean,
            factor: chol.l(),
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<T> {
        let z = DVector::from_fn(self.mean.len(), |_, _| {
            T::lit(rng.sample::<f64, _>(StandardNormal))
        });
        &self.mean + &self.factor * z
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianMixture<T: Real> {
    components: Vec<GaussianComponent<T>>,
    state_dim: usize,
    position_dim: usize,
}

impl<T: Real> GaussianMixture<T> {
    pub fn new(
        components: Vec<GaussianComponent<T>>,
        state_dim: usize,
        position_dim: usize,
    ) -> Result<Self> {
        if state_dim == 0 || position_dim == 0 || position_dim > state_dim {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= position_dim ({position_dim}) <= state_dim ({state_dim})"
            )));
        }
        if let Some(c) = components.iter().find(|c| c.dim() != state_dim) {
            return Err(Error::DimensionMismatch {
                expected: state_dim,
                got: c.dim(),
            });
        }
        Ok(Self {
            components,
            state_dim,
            position_dim,
        })
    }

    pub fn empty(state_dim: usize, position_dim: usize) -> Result<Self> {
        Self::new(Vec::new(), state_dim, position_dim)
    }

    /// Single component mixture; the whole state is position when
    /// `position_dim` equals the mean length.
    pub fn single(component: GaussianComponent<T>, position_dim: usize) -> Result<Self> {
        let n = component.dim();
        Self::new(vec![component], n, position_dim)
    }

    /// Same layout, different components. Dimensions are trusted.
    pub(crate) fn with_components(&self, components: Vec<GaussianComponent<T>>) -> Self {
        Self {
            components,
            state_dim: self.state_dim,
            position_dim: self.position_dim,
        }
    }

    pub fn components(&self) -> &[GaussianComponent<T>] {
        &self.components
    }

    pub fn into_components(self) -> Vec<GaussianComponent<T>> {
        self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn position_dim(&self) -> usize {
        self.position_dim
    }

    pub fn total_weight(&self) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.weight)
    }

    /// Multiplies every weight by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        self.with_components(
            self.components
                .iter()
                .map(|c| c.with_weight(c.weight * factor))
                .collect(),
        )
    }

    /// Rescales the weights to sum to one.
    pub fn normalized(&self) -> Result<Self> {
        let total = self.total_weight();
        if !(total > T::zero()) {
            return Err(Error::ZeroWeight);
        }
        Ok(self.with_components(
            self.components
                .iter()
                .map(|c| c.with_weight(c.weight / total))
                .collect(),
        ))
    }

    pub fn marginalize_position(&self) -> Self {
        Self {
            components: self
                .components
                .iter()
                .map(|c| c.position_marginal(self.position_dim))
                .collect(),
            state_dim: self.position_dim,
            position_dim: self.position_dim,
        }
    }

    /// Weighted density at a full state vector.
    pub fn density(&self, x: &DVector<T>) -> T {
        self.components
            .iter()
            .fold(T::zero(), |acc, c| acc + c.weight * c.pdf(x))
    }

    /// Weighted position-marginal density at a position vector.
    pub fn position_density(&self, x_p: &DVector<T>) -> T {
        let n_p = self.position_dim;
        self.components.iter().fold(T::zero(), |acc, c| {
            let m = c.mean.rows(0, n_p).into_owned();
            let p = c.covariance.view((0, 0), (n_p, n_p)).into_owned();
            acc + c.weight * gaussian_pdf(x_p, &m, &p).unwrap_or_else(|_| T::zero())
        })
    }

    /// Applies `x -> F x` and `P -> F P F^T + Q` to every component.
    pub fn propagate_linear(&self, transition: &DMatrix<T>, noise: &DMatrix<T>) -> Result<Self> {
        let n = self.state_dim;
        if transition.shape() != (n, n) || noise.shape() != (n, n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: transition.nrows(),
            });
        }
        Ok(self.with_components(
            self.components
                .iter()
                .map(|c| {
                    GaussianComponent::from_parts(
                        c.weight,
                        transition * &c.mean,
                        transition * &c.covariance * transition.transpose() + noise,
                    )
                })
                .collect(),
        ))
    }

    /// Weighted mean and total covariance (within plus between component spread).
    pub fn moments(&self) -> Result<(DVector<T>, DMatrix<T>)> {
        mixture_moments(&self.components)
    }
}

/// Descending eigenvalues and orthonormal eigenvectors (columns) of a
/// symmetric positive-definite matrix. The first entry of each eigenvector
/// whose magnitude exceeds 1e-12 is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenBasis<T: Real> {
    pub values: DVector<T>,
    pub vectors: DMatrix<T>,
}

impl<T: Real> EigenBasis<T> {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, i: usize) -> DVector<T> {
        self.vectors.column(i).into_owned()
    }

    /// `V Λ V^T`.
    pub fn reconstruct(&self) -> DMatrix<T> {
        &self.vectors * DMatrix::from_diagonal(&self.values) * self.vectors.transpose()
    }

    /// `V Λ^{1/2}`: maps whitened coordinates back to (centered) state space.
    pub fn sqrt_scaling(&self) -> DMatrix<T> {
        let roots = self.values.map(|v| v.sqrt());
        &self.vectors * DMatrix::from_diagonal(&roots)
    }
}

pub fn eigendecompose<T: Real>(m: &DMatrix<T>) -> Result<EigenBasis<T>> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            got: m.ncols(),
        });
    }
    let m = check_symmetric(m.clone())?;
    let n = m.nrows();
    let eig = SymmetricEigen::new(m);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let max = values[0];
    let min = values[n - 1];
    if !(max > T::zero()) || !(min > tol::<T>(SPD_TOLERANCE) * max) {
        let ratio = if max > T::zero() { (min / max).as_f64() } else { f64::NEG_INFINITY };
        return Err(Error::NonPositiveDefinite { ratio });
    }
    let mut vectors = DMatrix::zeros(n, n);
    let sign_floor = T::lit(1e-12);
    for (dst, &src) in order.iter().enumerate() {
        let mut v = eig.eigenvectors.column(src).into_owned();
        v /= v.norm();
        if let Some(first) = v.iter().find(|x| x.abs() > sign_floor) {
            if *first < T::zero() {
                v = -v;
            }
        }
        vectors.set_column(dst, &v);
    }
    Ok(EigenBasis { values, vectors })
}

fn check_symmetric<T: Real>(m: DMatrix<T>) -> Result<DMatrix<T>> {
    let scale = m.iter().fold(T::zero(), |a, v| a.max(v.abs()));
    let asym = (&m - m.transpose())
        .iter()
        .fold(T::zero(), |a, v| a.max(v.abs()));
    if asym > tol::<T>(SPD_TOLERANCE) * scale {
        return Err(Error::NotSymmetric {
            asymmetry: asym.as_f64(),
        });
    }
    Ok(symmetrize(m))
}

fn symmetrize<T: Real>(m: DMatrix<T>) -> DMatrix<T> {
    let t = m.transpose();
    (m + t) * T::lit(0.5)
}

/// `N(x; m, P)`.
pub fn gaussian_pdf<T: Real>(x: &DVector<T>, mean: &DVector<T>, cov: &DMatrix<T>) -> Result<T> {
    if x.len() != mean.len() || cov.nrows() != mean.len() {
        return Err(Error::DimensionMismatch {
            expected: mean.len(),
            got: x.len(),
        });
    }
    let n = mean.len();
    let chol = Cholesky::new(cov.clone()).ok_or(Error::NonPositiveDefinite { ratio: 0.0 })?;
    let diff = x - mean;
    let y = chol.l().solve_lower_triangular(&diff).expect("triangular factor is invertible");
    let log_det_half = chol
        .l()
        .diagonal()
        .iter()
        .fold(T::zero(), |a, d| a + d.ln());
    let log_norm = T::lit(0.5 * n as f64) * T::two_pi().ln() + log_det_half;
    Ok((-T::lit(0.5) * y.norm_squared() - log_norm).exp())
}

/// Squared Mahalanobis distance `(x - m)^T P^{-1} (x - m)`.
pub fn mahalanobis_squared<T: Real>(x: &DVector<T>, mean: &DVector<T>, cov: &DMatrix<T>) -> Result<T> {
    let chol = Cholesky::new(cov.clone()).ok_or(Error::NonPositiveDefinite { ratio: 0.0 })?;
    let y = chol
        .l()
        .solve_lower_triangular(&(x - mean))
        .expect("triangular factor is invertible");
    Ok(y.norm_squared())
}

/// `⟨a, b⟩ = ∫ a(x) b(x) dx`, using `⟨N(m1,P1), N(m2,P2)⟩ = N(m1; m2, P1 + P2)`.
pub fn inner_product<T: Real>(a: &GaussianMixture<T>, b: &GaussianMixture<T>) -> Result<T> {
    if a.state_dim != b.state_dim {
        return Err(Error::DimensionMismatch {
            expected: a.state_dim,
            got: b.state_dim,
        });
    }
    let mut acc = T::zero();
    for ca in &a.components {
        for cb in &b.components {
            let cov = &ca.covariance + &cb.covariance;
            acc += ca.weight * cb.weight * gaussian_pdf(&ca.mean, &cb.mean, &cov)?;
        }
    }
    Ok(acc)
}

/// Closed-form `∫ (a - b)^2`, clamped at zero.
pub fn l2_distance<T: Real>(a: &GaussianMixture<T>, b: &GaussianMixture<T>) -> Result<T> {
    let aa = inner_product(a, a)?;
    let ab = inner_product(a, b)?;
    let bb = inner_product(b, b)?;
    let d = aa - ab - ab + bb;
    Ok(if d > T::zero() { d } else { T::zero() })
}

pub fn mixture_moments<T: Real>(components: &[GaussianComponent<T>]) -> Result<(DVector<T>, DMatrix<T>)> {
    let first = components.first().ok_or(Error::ZeroWeight)?;
    let n = first.dim();
    let total = components.iter().fold(T::zero(), |a, c| a + c.weight);
    if !(total > T::zero()) {
        return Err(Error::ZeroWeight);
    }
    let mut mean = DVector::zeros(n);
    for c in components {
        mean += &c.mean * (c.weight / total);
    }
    let mut cov = DMatrix::zeros(n, n);
    for c in components {
        let d = &c.mean - &mean;
        cov += (&c.covariance + &d * d.transpose()) * (c.weight / total);
    }
    Ok((mean, symmetrize(cov)))
}

/// Removes components lighter than `prune_threshold`, then greedily merges:
/// the heaviest unmerged component absorbs every remaining component whose
/// mean lies within Mahalanobis distance `merge_threshold` under the
/// absorber's covariance. Merged clusters are moment matched. Clusters are
/// emitted in order of their smallest original index, so a reduction that
/// merges nothing leaves the mixture untouched.
pub fn merge_and_prune<T: Real>(
    gm: &GaussianMixture<T>,
    prune_threshold: T,
    merge_threshold: T,
) -> Result<GaussianMixture<T>> {
    if prune_threshold < T::zero() || merge_threshold < T::zero() {
        return Err(Error::InvalidArgument("thresholds must be nonnegative".into()));
    }
    let comps = gm.components();
    let mut remaining: Vec<usize> = (0..comps.len())
        .filter(|&i| !(comps[i].weight < prune_threshold))
        .collect();
    // Heaviest first; stable on index for equal weights.
    remaining.sort_by(|&a, &b| {
        comps[b]
            .weight
            .partial_cmp(&comps[a].weight)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });

    let mut clusters: Vec<Vec<usize>> = Vec::new();
    while let Some(&leader) = remaining.first() {
        let lc = &comps[leader];
        let mut members = vec![leader];
        let mut rest = Vec::with_capacity(remaining.len());
        for &j in &remaining[1..] {
            let d2 = mahalanobis_squared(&comps[j].mean, &lc.mean, &lc.covariance)?;
            if d2.sqrt() < merge_threshold {
                members.push(j);
            } else {
                rest.push(j);
            }
        }
        members.sort_unstable();
        clusters.push(members);
        remaining = rest;
    }
    clusters.sort_by_key(|m| m[0]);

    let mut out = Vec::with_capacity(clusters.len());
    for members in clusters {
        if members.len() == 1 {
            out.push(comps[members[0]].clone());
            continue;
        }
        let group: Vec<GaussianComponent<T>> = members.iter().map(|&i| comps[i].clone()).collect();
        let weight = group.iter().fold(T::zero(), |a, c| a + c.weight);
        if weight > T::zero() {
            let (mean, cov) = mixture_moments(&group)?;
            out.push(GaussianComponent::from_parts(weight, mean, cov));
        } else {
            out.push(group[0].clone());
        }
    }
    Ok(gm.with_components(out))
}
