//! FoV-driven recursive splitting and the updates built on it.
//!
//! [`split_for_fov`] refines a mixture near the FoV boundary: a component is
//! split when its weight is at least `w_min` and its collocation grid is
//! neither entirely inside nor entirely outside the FoV. The split runs along
//! the full-state eigenvector best aligned with the position direction that
//! crosses the most uniformly classified grid planes, and the children are
//! examined again. [`mean_partition`] then assigns each component wholly to
//! the inside or the outside of the FoV according to its mean.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fov::{classify_grid, CollocationGrid, FieldOfView, GridClassification};
use crate::gmix::{eigendecompose, EigenBasis, GaussianComponent, GaussianMixture};
use crate::scalar::Real;
use crate::splitlib::{SplitLibrary, SplitParameters};

/// Alignment scores closer than this count as tied.
const ALIGNMENT_TIE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitConfig<T: Real> {
    /// Components lighter than this are never split.
    pub w_min: T,
    /// Number of children per split (`R`).
    pub components: usize,
    /// Split-library regularizer (`λ`).
    pub lambda: f64,
    /// Collocation grid half-width in standard deviations (`ζ`).
    pub zeta: T,
    /// Collocation points per axis (`N`).
    pub grid_points: usize,
    pub max_depth: usize,
}

impl<T: Real> Default for SplitConfig<T> {
    fn default() -> Self {
        Self {
            w_min: T::lit(0.01),
            components: 3,
            lambda: 1e-3,
            zeta: T::lit(CollocationGrid::<T>::DEFAULT_ZETA),
            grid_points: CollocationGrid::<T>::DEFAULT_POINTS,
            max_depth: 10,
        }
    }
}

impl<T: Real> SplitConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.w_min > T::zero() && self.w_min < T::one()) {
            return Err(Error::InvalidArgument(format!("w_min must lie in (0, 1), got {}", self.w_min)));
        }
        if self.max_depth < 1 {
            return Err(Error::InvalidArgument("max_depth must be at least 1".into()));
        }
        CollocationGrid::new(self.zeta, self.grid_points, 1)?;
        Ok(())
    }

    pub fn grid(&self, dim: usize) -> Result<CollocationGrid<T>> {
        CollocationGrid::new(self.zeta, self.grid_points, dim)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SplitDiagnostics {
    pub splits_performed: usize,
    pub depth_reached: usize,
    /// Some component still qualified for splitting at `max_depth`.
    pub depth_capped: bool,
}

impl SplitDiagnostics {
    fn absorb(&mut self, other: SplitDiagnostics) {
        self.splits_performed += other.splits_performed;
        self.depth_reached = self.depth_reached.max(other.depth_reached);
        self.depth_capped |= other.depth_capped;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Refinement<T: Real> {
    pub mixture: GaussianMixture<T>,
    pub diagnostics: SplitDiagnostics,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionDiagnostics<T: Real> {
    pub splits_performed: usize,
    pub depth_reached: usize,
    pub depth_capped: bool,
    pub mass_inside: T,
    pub mass_outside: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PartitionResult<T: Real> {
    pub inside: GaussianMixture<T>,
    pub outside: GaussianMixture<T>,
    /// The mixture that was partitioned (after any splitting).
    pub refined: GaussianMixture<T>,
    /// For each component of `refined`, whether it went inside.
    pub assignment: Vec<bool>,
    pub diagnostics: PartitionDiagnostics<T>,
}

/// Position axis whose constant-coordinate planes are most often uniformly
/// classified. Ties go to the larger eigenvalue, then the smaller index.
pub fn choose_position_direction<T: Real>(
    classification: &GridClassification,
    eigenvalues: &DVector<T>,
) -> Result<usize> {
    if classification.all_same {
        return Err(Error::InvalidArgument(
            "no split direction: the grid is uniformly classified".into(),
        ));
    }
    if eigenvalues.len() != classification.plane_counts.len() {
        return Err(Error::DimensionMismatch {
            expected: classification.plane_counts.len(),
            got: eigenvalues.len(),
        });
    }
    let mut best = 0;
    for j in 1..classification.plane_counts.len() {
        let (cj, cb) = (classification.plane_counts[j], classification.plane_counts[best]);
        if cj > cb || (cj == cb && eigenvalues[j] > eigenvalues[best]) {
            best = j;
        }
    }
    Ok(best)
}

/// Full-state eigenvector maximizing `|[v_p^T 0^T] v_k|`. Ties go to the
/// larger eigenvalue, then the smaller index.
pub fn choose_fullstate_direction<T: Real>(
    position_direction: &DVector<T>,
    basis_full: &EigenBasis<T>,
) -> Result<usize> {
    let n_p = position_direction.len();
    if n_p > basis_full.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis_full.dim(),
            got: n_p,
        });
    }
    let scores: Vec<T> = (0..basis_full.dim())
        .map(|k| {
            basis_full
                .vectors
                .view((0, k), (n_p, 1))
                .dot(position_direction)
                .abs()
        })
        .collect();
    let top = scores.iter().fold(T::zero(), |a, &s| a.max(s));
    let tie = T::lit(ALIGNMENT_TIE);
    let mut best: Option<usize> = None;
    for (k, &s) in scores.iter().enumerate() {
        if s + tie < top {
            continue;
        }
        match best {
            Some(b) if basis_full.values[k] <= basis_full.values[b] => {}
            _ => best = Some(k),
        }
    }
    Ok(best.expect("at least one eigenvector"))
}

/// Replaces `c` by `R` components displaced along eigenvector `k` of its
/// covariance, with that eigenvalue scaled by `σ̃²`.
pub fn split_component<T: Real>(
    c: &GaussianComponent<T>,
    k: usize,
    params: &SplitParameters,
) -> Result<Vec<GaussianComponent<T>>> {
    let basis = eigendecompose(c.covariance())?;
    if k >= basis.dim() {
        return Err(Error::InvalidArgument(format!("eigen index {k} out of range")));
    }
    Ok(split_along(c, &basis, k, params))
}

fn split_along<T: Real>(
    c: &GaussianComponent<T>,
    basis: &EigenBasis<T>,
    k: usize,
    params: &SplitParameters,
) -> Vec<GaussianComponent<T>> {
    let v = basis.vector(k);
    let lambda_k = basis.values[k];
    let sigma2 = T::lit(params.sigma * params.sigma);
    // V diag(.., σ̃²λ_k, ..) V^T written as a rank-one correction of P.
    let cov = c.covariance() + &v * v.transpose() * ((sigma2 - T::one()) * lambda_k);
    let root = lambda_k.sqrt();
    params
        .weights
        .iter()
        .zip(&params.means)
        .map(|(&w, &m)| {
            GaussianComponent::from_parts(
                c.weight() * T::lit(w),
                c.mean() + &v * (root * T::lit(m)),
                cov.clone(),
            )
        })
        .collect()
}

struct Splitter<'a, T: Real> {
    fov: &'a FieldOfView<T>,
    cfg: &'a SplitConfig<T>,
    params: &'a SplitParameters,
    grid: CollocationGrid<T>,
    n_p: usize,
}

enum Verdict<T: Real> {
    Keep,
    Split { basis: EigenBasis<T>, k: usize },
}

impl<T: Real> Splitter<'_, T> {
    fn examine(&self, c: &GaussianComponent<T>) -> Result<Verdict<T>> {
        if c.weight() < self.cfg.w_min {
            return Ok(Verdict::Keep);
        }
        let marginal = c.position_marginal(self.n_p);
        let basis_p = eigendecompose(marginal.covariance())?;
        let classification = classify_grid(self.fov, &self.grid, &basis_p, marginal.mean())?;
        if classification.all_same {
            return Ok(Verdict::Keep);
        }
        let j = choose_position_direction(&classification, &basis_p.values)?;
        let basis = eigendecompose(c.covariance())?;
        let k = choose_fullstate_direction(&basis_p.vector(j), &basis)?;
        Ok(Verdict::Split { basis, k })
    }

    fn refine(
        &self,
        c: GaussianComponent<T>,
        depth: usize,
        out: &mut Vec<GaussianComponent<T>>,
        diag: &mut SplitDiagnostics,
    ) -> Result<()> {
        match self.examine(&c)? {
            Verdict::Keep => out.push(c),
            Verdict::Split { .. } if depth >= self.cfg.max_depth => {
                diag.depth_capped = true;
                out.push(c);
            }
            Verdict::Split { basis, k } => {
                diag.splits_performed += 1;
                diag.depth_reached = diag.depth_reached.max(depth + 1);
                for child in split_along(&c, &basis, k, self.params) {
                    self.refine(child, depth + 1, out, diag)?;
                }
            }
        }
        Ok(())
    }
}

/// Recursive FoV splitting. Each input component is replaced in place by its
/// refinement, so the output is ordered by parent then split index. Hitting
/// `max_depth` is reported through the diagnostics, not as an error.
pub fn split_for_fov<T: Real>(
    gm: &GaussianMixture<T>,
    fov: &FieldOfView<T>,
    cfg: &SplitConfig<T>,
    lib: &SplitLibrary,
) -> Result<Refinement<T>> {
    cfg.validate()?;
    let n_p = gm.position_dim();
    fov.check_dim(n_p)?;
    let params = lib.get(cfg.components, cfg.lambda)?;
    let splitter = Splitter {
        fov,
        cfg,
        params,
        grid: cfg.grid(n_p)?,
        n_p,
    };
    let pieces: Vec<(Vec<GaussianComponent<T>>, SplitDiagnostics)> = gm
        .components()
        .par_iter()
        .map(|c| {
            let mut out = Vec::new();
            let mut diag = SplitDiagnostics::default();
            splitter.refine(c.clone(), 0, &mut out, &mut diag)?;
            Ok((out, diag))
        })
        .collect::<Result<_>>()?;
    let mut diagnostics = SplitDiagnostics::default();
    let mut components = Vec::with_capacity(pieces.iter().map(|p| p.0.len()).sum());
    for (out, diag) in pieces {
        components.extend(out);
        diagnostics.absorb(diag);
    }
    Ok(Refinement {
        mixture: gm.with_components(components),
        diagnostics,
    })
}

/// Assigns every component to the inside of the FoV iff its position mean is
/// in the (closed) FoV.
pub fn mean_partition<T: Real>(gm: &GaussianMixture<T>, fov: &FieldOfView<T>) -> Result<PartitionResult<T>> {
    partition_refined(
        Refinement {
            mixture: gm.clone(),
            diagnostics: SplitDiagnostics::default(),
        },
        fov,
    )
}

fn partition_refined<T: Real>(refined: Refinement<T>, fov: &FieldOfView<T>) -> Result<PartitionResult<T>> {
    let gm = refined.mixture;
    let n_p = gm.position_dim();
    fov.check_dim(n_p)?;
    let assignment: Vec<bool> = gm
        .components()
        .iter()
        .map(|c| fov.contains_unchecked(c.mean().rows(0, n_p).iter().copied()))
        .collect();
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for (c, &is_in) in gm.components().iter().zip(&assignment) {
        if is_in {
            inside.push(c.clone());
        } else {
            outside.push(c.clone());
        }
    }
    let inside = gm.with_components(inside);
    let outside = gm.with_components(outside);
    let diagnostics = PartitionDiagnostics {
        splits_performed: refined.diagnostics.splits_performed,
        depth_reached: refined.diagnostics.depth_reached,
        depth_capped: refined.diagnostics.depth_capped,
        mass_inside: inside.total_weight(),
        mass_outside: outside.total_weight(),
    };
    Ok(PartitionResult {
        inside,
        outside,
        refined: gm,
        assignment,
        diagnostics,
    })
}

/// [`split_for_fov`] followed by [`mean_partition`].
pub fn partition<T: Real>(
    gm: &GaussianMixture<T>,
    fov: &FieldOfView<T>,
    cfg: &SplitConfig<T>,
    lib: &SplitLibrary,
) -> Result<PartitionResult<T>> {
    partition_refined(split_for_fov(gm, fov, cfg, lib)?, fov)
}

/// A posterior density and the prior probability of the conditioning event.
#[derive(Debug, Clone, PartialEq)]
pub struct Update<T: Real> {
    pub density: GaussianMixture<T>,
    /// Unnormalized mass retained by the update, e.g. `⟨1_S, p⟩` for presence.
    pub retained_mass: T,
    pub diagnostics: PartitionDiagnostics<T>,
}

fn normalized_update<T: Real>(
    kept: GaussianMixture<T>,
    diagnostics: PartitionDiagnostics<T>,
    what: &str,
) -> Result<Update<T>> {
    let retained_mass = kept.total_weight();
    if !(retained_mass > T::zero()) {
        return Err(Error::Contradiction(what.into()));
    }
    Ok(Update {
        density: kept.normalized()?,
        retained_mass,
        diagnostics,
    })
}

/// Conditions on the object being inside the FoV.
pub fn update_presence<T: Real>(
    gm: &GaussianMixture<T>,
    fov: &FieldOfView<T>,
    cfg: &SplitConfig<T>,
    lib: &SplitLibrary,
) -> Result<Update<T>> {
    let part = partition(gm, fov, cfg, lib)?;
    normalized_update(part.inside, part.diagnostics, "object cannot be inside the FoV")
}

/// Conditions on the object being outside the FoV.
pub fn update_absence<T: Real>(
    gm: &GaussianMixture<T>,
    fov: &FieldOfView<T>,
    cfg: &SplitConfig<T>,
    lib: &SplitLibrary,
) -> Result<Update<T>> {
    let part = partition(gm, fov, cfg, lib)?;
    normalized_update(part.outside, part.diagnostics, "object cannot be outside the FoV")
}

/// Bayes update for "not detected" with constant detection probability
/// `p_d` inside the FoV: the posterior is proportional to
/// `(1 - p_d) p_S + p_C(S)`.
pub fn update_nondetection<T: Real>(
    gm: &GaussianMixture<T>,
    fov: &FieldOfView<T>,
    p_d: T,
    cfg: &SplitConfig<T>,
    lib: &SplitLibrary,
) -> Result<Update<T>> {
    if !(p_d >= T::zero() && p_d <= T::one()) {
        return Err(Error::InvalidArgument(format!("p_d must lie in [0, 1], got {p_d}")));
    }
    if p_d == T::zero() {
        let total = gm.total_weight();
        return Ok(Update {
            density: gm.clone(),
            retained_mass: total,
            diagnostics: PartitionDiagnostics {
                splits_performed: 0,
                depth_reached: 0,
                depth_capped: false,
                mass_inside: T::zero(),
                mass_outside: total,
            },
        });
    }
    let part = partition(gm, fov, cfg, lib)?;
    let keep = T::one() - p_d;
    let components: Vec<GaussianComponent<T>> = part
        .refined
        .components()
        .iter()
        .zip(&part.assignment)
        .filter_map(|(c, &is_in)| match (is_in, keep == T::zero()) {
            (false, _) => Some(c.clone()),
            (true, true) => None,
            (true, false) => Some(c.with_weight(c.weight() * keep)),
        })
        .collect();
    normalized_update(
        part.refined.with_components(components),
        part.diagnostics,
        "object is certainly inside the FoV and certainly detected",
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use nalgebra::{dmatrix, dvector, DMatrix};

    fn lib() -> &'static SplitLibrary {
        SplitLibrary::builtin()
    }

    fn std_normal(dim: usize) -> GaussianMixture<f64> {
        GaussianMixture::single(
            GaussianComponent::new(1.0, DVector::zeros(dim), DMatrix::identity(dim, dim)).unwrap(),
            dim,
        )
        .unwrap()
    }

    fn classification(counts: Vec<usize>) -> GridClassification {
        GridClassification {
            flags: vec![true, false],
            points_per_dim: 7,
            all_same: false,
            plane_counts: counts,
        }
    }

    #[test]
    fn position_direction_rules() {
        assert_eq!(choose_position_direction(&classification(vec![7, 0]), &dvector![1.0, 1.0]).unwrap(), 0);
        assert_eq!(choose_position_direction(&classification(vec![3, 3]), &dvector![4.0, 1.0]).unwrap(), 0);
        assert_eq!(choose_position_direction(&classification(vec![3, 3]), &dvector![1.0, 1.0]).unwrap(), 0);
        assert_eq!(choose_position_direction(&classification(vec![3, 3]), &dvector![1.0, 4.0]).unwrap(), 1);
        assert_eq!(choose_position_direction(&classification(vec![2, 5]), &dvector![4.0, 1.0]).unwrap(), 1);
        let mut same = classification(vec![7, 7]);
        same.all_same = true;
        assert!(choose_position_direction(&same, &dvector![1.0, 1.0]).is_err());
    }

    #[test]
    fn fullstate_direction_rules() {
        // Block-diagonal: position block diag(1, 3), velocity block diag(2, 0.5).
        let p = DMatrix::from_diagonal(&dvector![1.0, 3.0, 2.0, 0.5]);
        let basis = eigendecompose(&p).unwrap();
        let k = choose_fullstate_direction(&dvector![1.0, 0.0], &basis).unwrap();
        assert_eq!(basis.vector(k), dvector![1.0, 0.0, 0.0, 0.0]);

        let pp = dmatrix![3.0, 1.0; 1.0, 2.0];
        let bp = eigendecompose(&pp).unwrap();
        for j in 0..2 {
            assert_eq!(choose_fullstate_direction(&bp.vector(j), &bp).unwrap(), j);
        }

        let full = dmatrix![
            2.0, 0.3, 0.8, 0.1;
            0.3, 1.0, 0.2, 0.5;
            0.8, 0.2, 1.5, 0.0;
            0.1, 0.5, 0.0, 0.7
        ];
        let bf: EigenBasis<f64> = eigendecompose(&full).unwrap();
        let bpos = eigendecompose(&full.view((0, 0), (2, 2)).into_owned()).unwrap();
        for j in 0..2 {
            let v = bpos.vector(j);
            let brute = (0..4)
                .map(|k| (k, (v[0] * bf.vectors[(0, k)] + v[1] * bf.vectors[(1, k)]).abs()))
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(choose_fullstate_direction(&v, &bf).unwrap(), brute);
        }
    }

    #[test]
    fn split_component_examples() {
        let params = lib().get(3, 1e-3).unwrap();
        let c = std_normal(2).components()[0].clone();
        let kids = split_component(&c, 0, params).unwrap();
        assert_eq!(kids.len(), 3);
        assert_relative_eq!(kids.iter().map(|k| k.weight()).sum::<f64>(), 1.0, epsilon = 1e-15);
        let basis = eigendecompose(c.covariance()).unwrap();
        for (kid, m) in kids.iter().zip(&params.means) {
            assert_relative_eq!(kid.mean(), &(basis.vector(0) * *m), epsilon = 1e-15);
            let s2 = params.sigma * params.sigma;
            let v = basis.vector(0);
            let expect = DMatrix::identity(2, 2) + &v * v.transpose() * (s2 - 1.0);
            assert_relative_eq!(kid.covariance(), &expect, epsilon = 1e-15);
        }
        assert!(split_component(&c, 2, params).is_err());
    }

    #[test]
    fn split_l2_matches_library_cost() {
        let params = lib().get(3, 1e-3).unwrap();
        let c = GaussianComponent::new(1.0, dvector![1.0, -2.0], dmatrix![2.0, 0.6; 0.6, 1.0]).unwrap();
        let original = GaussianMixture::single(c.clone(), 2).unwrap();
        for k in 0..2 {
            let kids = GaussianMixture::new(split_component(&c, k, params).unwrap(), 2, 2).unwrap();
            let l2 = crate::gmix::l2_distance(&original, &kids).unwrap();
            // 2-D L2 equals the 1-D library L2 scaled by the Jacobian and the
            // orthogonal factor's self inner product.
            let basis: EigenBasis<f64> = eigendecompose(c.covariance()).unwrap();
            let other = basis.values[1 - k];
            let scale = 1.0 / (basis.values[k].sqrt() * (4.0 * std::f64::consts::PI * other).sqrt());
            let expected = (params.achieved_cost - params.lambda * params.sigma * params.sigma) * scale;
            assert_relative_eq!(l2, expected, epsilon = 1e-9);
        }
        // 1-D: the unscaled library L2.
        let one = GaussianComponent::new(1.0, dvector![0.0], dmatrix![1.0]).unwrap();
        let kids = GaussianMixture::new(split_component(&one, 0, params).unwrap(), 1, 1).unwrap();
        let l2 = crate::gmix::l2_distance(&GaussianMixture::single(one, 1).unwrap(), &kids).unwrap();
        assert!(l2 <= params.achieved_cost - params.lambda * params.sigma * params.sigma + 1e-9);
    }

    #[test]
    fn no_split_cases() {
        let gm = std_normal(2);
        let big = FieldOfView::new_box(dvector![-50.0, -50.0], dvector![50.0, 50.0]).unwrap();
        let cfg = SplitConfig::default();
        let r = split_for_fov(&gm, &big, &cfg, lib()).unwrap();
        assert_eq!(r.mixture, gm);
        assert_eq!(r.diagnostics.splits_performed, 0);

        let light = gm.scaled(0.005);
        let half = FieldOfView::half_space_below(2, 0, 0.0).unwrap();
        let r = split_for_fov(&light, &half, &cfg, lib()).unwrap();
        assert_eq!(r.mixture, light);
    }

    #[test]
    fn half_plane_refines_along_e1_only() {
        let gm = std_normal(2);
        let half = FieldOfView::half_space_below(2, 0, 0.0).unwrap();
        let cfg = SplitConfig::default();
        let r = split_for_fov(&gm, &half, &cfg, lib()).unwrap();
        assert!(r.diagnostics.splits_performed > 0);
        assert_relative_eq!(r.mixture.total_weight(), 1.0, epsilon = 1e-12);
        let grid = cfg.grid(2).unwrap();
        for c in r.mixture.components() {
            assert_eq!(c.mean()[1], 0.0);
            assert_relative_eq!(c.covariance()[(1, 1)], 1.0, epsilon = 1e-12);
            assert!(c.covariance()[(0, 1)].abs() < 1e-12);
            let basis = eigendecompose(c.covariance()).unwrap();
            let cls = classify_grid(&half, &grid, &basis, c.mean()).unwrap();
            assert!(cls.all_same || c.weight() < cfg.w_min);
        }
    }

    #[test]
    fn mean_partition_examples() {
        let gm = std_normal(1);
        let half = FieldOfView::half_space_below(1, 0, 0.0).unwrap();
        let p = mean_partition(&gm, &half).unwrap();
        assert_eq!(p.diagnostics.mass_inside, 1.0);
        assert!(p.outside.is_empty());

        let r = partition(&gm, &half, &SplitConfig::default(), lib()).unwrap();
        let m = r.diagnostics.mass_inside;
        assert!((0.48..=0.52).contains(&m), "{m}");
        assert_relative_eq!(r.diagnostics.mass_inside + r.diagnostics.mass_outside, r.refined.total_weight(), epsilon = 1e-12);
        assert_eq!(r.assignment.len(), r.refined.len());
    }

    #[test]
    fn updates() {
        let gm = std_normal(2);
        let cfg = SplitConfig::default();
        let big = FieldOfView::new_box(dvector![-50.0, -50.0], dvector![50.0, 50.0]).unwrap();
        let up = update_presence(&gm, &big, &cfg, lib()).unwrap();
        assert_eq!(up.density, gm);
        assert_eq!(up.retained_mass, 1.0);
        assert!(matches!(update_absence(&gm, &big, &cfg, lib()), Err(Error::Contradiction(_))));

        let half = FieldOfView::half_space_below(2, 0, 0.0).unwrap();
        let pres = update_presence(&gm, &half, &cfg, lib()).unwrap();
        let abs = update_absence(&gm, &half, &cfg, lib()).unwrap();
        assert!((pres.retained_mass - 0.5).abs() < 0.02);
        assert_relative_eq!(pres.retained_mass + abs.retained_mass, 1.0, epsilon = 1e-12);
        assert_relative_eq!(pres.density.total_weight(), 1.0, epsilon = 1e-12);

        let nd0 = update_nondetection(&gm, &half, 0.0, &cfg, lib()).unwrap();
        assert_eq!(nd0.density, gm);
        let nd1 = update_nondetection(&gm, &half, 1.0, &cfg, lib()).unwrap();
        assert_eq!(nd1.density.len(), abs.density.len());
        for (a, b) in nd1.density.components().iter().zip(abs.density.components()) {
            assert!((a.weight() - b.weight()).abs() <= 1e-12);
            assert_eq!(a.mean(), b.mean());
        }
        let nd = update_nondetection(&gm, &half, 0.5, &cfg, lib()).unwrap();
        assert_relative_eq!(nd.retained_mass, 1.0 - 0.5 * pres.retained_mass, epsilon = 1e-12);
        assert!(update_nondetection(&gm, &half, 1.5, &cfg, lib()).is_err());
        assert!(matches!(
            update_nondetection(&gm, &big, 1.0, &cfg, lib()),
            Err(Error::Contradiction(_))
        ));
    }

    #[test]
    fn config_validation() {
        let mut cfg = SplitConfig::<f64>::default();
        cfg.w_min = 0.0;
        assert!(cfg.validate().is_err());
        cfg.w_min = 0.01;
        cfg.max_depth = 0;
        assert!(cfg.validate().is_err());
        let gm = std_normal(1);
        let half = FieldOfView::half_space_below(1, 0, 0.0).unwrap();
        let mut cfg = SplitConfig::default();
        cfg.components = 8;
        assert!(matches!(split_for_fov(&gm, &half, &cfg, lib()), Err(Error::MissingSplitEntry { .. })));
    }
}
