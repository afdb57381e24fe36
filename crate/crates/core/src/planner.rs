//! FoV placement by exhaustive search over a grid of candidate centers.
//!
//! Each candidate translates a template FoV (given relative to the origin) to
//! a grid point of the region of interest and scores it by the variance of
//! the FoV cardinality pmf. The map is stored in grid order with the first
//! axis varying slowest, and the first strict maximum in that order wins, so
//! ties resolve to the lexicographically smallest center.

use nalgebra::DVector;
use rayon::prelude::*;

use crate::cardinality::{pmf_moments, CardinalityPmf, PmfMethod, PreparedModel};
use crate::error::{Error, Result};
use crate::fov::FieldOfView;
use crate::models::{FovMassMethod, RfsModel};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementQuery<T: Real> {
    /// FoV shape placed with its reference point at the origin.
    pub fov_template: FieldOfView<T>,
    /// Axis-aligned box the candidate centers are drawn from.
    pub roi: FieldOfView<T>,
    /// Candidate centers per axis.
    pub grid_resolution: usize,
    pub model: RfsModel<T>,
    pub pmf_method: PmfMethod,
    pub mass_method: FovMassMethod<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlacementResult<T: Real> {
    /// Candidate centers in grid order.
    pub centers: Vec<DVector<T>>,
    /// Cardinality variance at each center.
    pub variances: Vec<T>,
    pub best_index: usize,
    pub best_center: DVector<T>,
    pub best_variance: T,
    pub best_pmf: CardinalityPmf<T>,
}

impl<T: Real> PlacementResult<T> {
    pub fn variance_map(&self) -> impl Iterator<Item = (&DVector<T>, T)> {
        self.centers.iter().zip(self.variances.iter().copied())
    }
}

fn roi_bounds<T: Real>(roi: &FieldOfView<T>) -> Result<(&DVector<T>, &DVector<T>)> {
    match roi {
        FieldOfView::Box { lo, hi } if lo.iter().chain(hi.iter()).all(|v| v.is_finite()) => Ok((lo, hi)),
        _ => Err(Error::InvalidArgument("region of interest must be a bounded box".into())),
    }
}

/// Uniform grid over the box `roi` with `resolution` points per axis,
/// first axis slowest.
pub fn candidate_grid<T: Real>(roi: &FieldOfView<T>, resolution: usize) -> Result<Vec<DVector<T>>> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!("grid resolution must be at least 2, got {resolution}")));
    }
    let (lo, hi) = roi_bounds(roi)?;
    let dim = lo.len();
    let total = (resolution as u128)
        .checked_pow(dim as u32)
        .filter(|&n| n <= 1 << 24)
        .ok_or_else(|| Error::InvalidArgument("candidate grid is too large".into()))? as usize;
    let denom = T::lit((resolution - 1) as f64);
    Ok((0..total)
        .map(|flat| {
            let mut rest = flat;
            let mut idx = vec![0; dim];
            for axis in (0..dim).rev() {
                idx[axis] = rest % resolution;
                rest /= resolution;
            }
            DVector::from_fn(dim, |axis, _| {
                lo[axis] + (hi[axis] - lo[axis]) * T::lit(idx[axis] as f64) / denom
            })
        })
        .collect())
}

fn check_query<T: Real>(query: &PlacementQuery<T>) -> Result<()> {
    let dim = query.model.position_dim();
    query.fov_template.check_dim(dim)?;
    query.roi.check_dim(dim)?;
    roi_bounds(&query.roi)?;
    if query.grid_resolution < 2 {
        return Err(Error::InvalidArgument("grid resolution must be at least 2".into()));
    }
    query.mass_method.validate()
}

fn score<T: Real>(prepared: &PreparedModel<T>, query: &PlacementQuery<T>, center: &DVector<T>) -> Result<(CardinalityPmf<T>, T)> {
    let fov = query.fov_template.translated(center)?;
    let pmf = prepared.pmf(&fov, query.pmf_method)?;
    let (_, var) = pmf_moments(&pmf);
    Ok((pmf, var))
}

/// Cardinality pmf and its variance for the FoV centered at `center`.
pub fn evaluate_candidate<T: Real>(center: &DVector<T>, query: &PlacementQuery<T>) -> Result<(CardinalityPmf<T>, T)> {
    check_query(query)?;
    let prepared = PreparedModel::new(&query.model, &query.mass_method)?;
    score(&prepared, query, center)
}

/// Scores every grid candidate and returns the map and its maximizer.
pub fn grid_search<T: Real>(query: &PlacementQuery<T>) -> Result<PlacementResult<T>> {
    check_query(query)?;
    let centers = candidate_grid(&query.roi, query.grid_resolution)?;
    let prepared = PreparedModel::new(&query.model, &query.mass_method)?;
    let scored: Vec<(CardinalityPmf<T>, T)> = centers
        .par_iter()
        .map(|c| score(&prepared, query, c))
        .collect::<Result<_>>()?;
    let mut best_index = 0;
    for (i, (_, v)) in scored.iter().enumerate() {
        if *v > scored[best_index].1 {
            best_index = i;
        }
    }
    let variances: Vec<T> = scored.iter().map(|(_, v)| *v).collect();
    let best_pmf = scored.into_iter().nth(best_index).expect("non-empty grid").0;
    Ok(PlacementResult {
        best_center: centers[best_index].clone(),
        best_variance: variances[best_index],
        best_index,
        best_pmf,
        centers,
        variances,
    })
}

/// PHD of `model` evaluated on a `resolution`-per-axis grid over `roi`, in
/// the same order as [`candidate_grid`].
pub fn phd_grid<T: Real>(model: &RfsModel<T>, roi: &FieldOfView<T>, resolution: usize) -> Result<Vec<(DVector<T>, T)>> {
    roi.check_dim(model.position_dim())?;
    let phd = model.phd()?;
    let points = candidate_grid(roi, resolution)?;
    Ok(points
        .into_par_iter()
        .map(|x| {
            let d = phd.position_density(&x);
            (x, d)
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmix::{GaussianComponent, GaussianMixture};
    use crate::models::{Bernoulli, MultiBernoulli};
    use approx::assert_relative_eq;
    use nalgebra::{dvector, DMatrix};

    fn bernoulli(r: f64, x: f64, y: f64, var: f64) -> Bernoulli<f64> {
        let c = GaussianComponent::new(1.0, dvector![x, y], DMatrix::identity(2, 2) * var).unwrap();
        Bernoulli {
            existence: r,
            density: GaussianMixture::single(c, 2).unwrap(),
        }
    }

    fn query(model: MultiBernoulli<f64>, roi: f64, res: usize) -> PlacementQuery<f64> {
        PlacementQuery {
            fov_template: FieldOfView::new_box(dvector![-0.5, -0.5], dvector![0.5, 0.5]).unwrap(),
            roi: FieldOfView::new_box(dvector![-roi, -roi], dvector![roi, roi]).unwrap(),
            grid_resolution: res,
            model: RfsModel::MultiBernoulli(model),
            pmf_method: PmfMethod::Exact,
            mass_method: FovMassMethod::ExactBoxDiagonal,
        }
    }

    #[test]
    fn grid_order_is_lexicographic() {
        let roi = FieldOfView::new_box(dvector![0.0, 10.0], dvector![1.0, 12.0]).unwrap();
        let g = candidate_grid(&roi, 3).unwrap();
        assert_eq!(g.len(), 9);
        assert_eq!(g[0], dvector![0.0, 10.0]);
        assert_eq!(g[1], dvector![0.0, 11.0]);
        assert_eq!(g[3], dvector![0.5, 10.0]);
        assert_eq!(g[8], dvector![1.0, 12.0]);
        assert!(candidate_grid(&roi, 1).is_err());
    }

    #[test]
    fn candidate_examples() {
        let mb = MultiBernoulli::new(vec![bernoulli(0.5, 0.0, 0.0, 1e-4)]).unwrap();
        let q = query(mb, 2.0, 5);
        let (pmf, var) = evaluate_candidate(&dvector![0.0, 0.0], &q).unwrap();
        assert_relative_eq!(var, 0.25, epsilon = 1e-12);
        assert_relative_eq!(pmf.probs()[1], 0.5, epsilon = 1e-12);
        let (pmf, var) = evaluate_candidate(&dvector![30.0, 30.0], &q).unwrap();
        assert!(var < 1e-12);
        assert_relative_eq!(pmf.probs()[0], 1.0, epsilon = 1e-12);

        let sure = MultiBernoulli::new(vec![bernoulli(crate::models::MAX_EXISTENCE, 0.0, 0.0, 1e-4)]).unwrap();
        let (_, var) = evaluate_candidate(&dvector![0.0, 0.0], &query(sure, 2.0, 5)).unwrap();
        assert!(var < 1e-8);
    }

    #[test]
    fn best_center_tracks_single_bernoulli() {
        // A template as wide as a grid cell; a wider one contains the
        // component from a plateau of centers and the first of them wins.
        let mb = MultiBernoulli::new(vec![bernoulli(0.5, 0.63, -0.87, 1e-4)]).unwrap();
        let mut q = query(mb, 2.0, 21);
        let cell = 4.0 / 20.0;
        q.fov_template = FieldOfView::new_box(dvector![-0.1, -0.1], dvector![0.1, 0.1]).unwrap();
        let res = grid_search(&q).unwrap();
        assert!((res.best_center[0] - 0.63).abs() <= cell);
        assert!((res.best_center[1] + 0.87).abs() <= cell);
        assert_eq!(res.best_variance, evaluate_candidate(&res.best_center, &q).unwrap().1);
        assert!(res.variances.iter().all(|&v| v <= res.best_variance));
    }

    #[test]
    fn resolution_two_has_four_candidates() {
        let mb = MultiBernoulli::new(vec![bernoulli(0.5, 0.0, 0.0, 0.1)]).unwrap();
        let res = grid_search(&query(mb, 1.0, 2)).unwrap();
        assert_eq!(res.centers.len(), 4);
        // All four corners are equivalent by symmetry; the first wins.
        assert_eq!(res.best_index, 0);
    }

    #[test]
    fn phd_grid_matches_density() {
        let mb = MultiBernoulli::new(vec![bernoulli(0.5, 0.0, 0.0, 1.0)]).unwrap();
        let model = RfsModel::MultiBernoulli(mb);
        let roi = FieldOfView::new_box(dvector![-1.0, -1.0], dvector![1.0, 1.0]).unwrap();
        let g = phd_grid(&model, &roi, 3).unwrap();
        assert_eq!(g.len(), 9);
        assert_relative_eq!(g[4].1, 0.5 / (2.0 * std::f64::consts::PI), epsilon = 1e-15);
    }
}
