//! Field-of-view geometry and the collocation-grid test that decides whether
//! a Gaussian component straddles the FoV boundary.
//!
//! Membership is closed: boundary points are inside. A component is examined
//! in its whitened frame `z = Λ^{-1/2} V^T (x_p - m_p)`, where Euclidean
//! distance from the origin equals Mahalanobis distance in position space.
//! Grid points are pulled back through `x_p = V Λ^{1/2} z + m_p` and tested
//! against the original FoV, so any convex shape works without transforming
//! the set itself.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::gmix::EigenBasis;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub enum FieldOfView<T: Real> {
    /// `lo <= x <= hi` componentwise. Bounds may be infinite.
    Box { lo: DVector<T>, hi: DVector<T> },
    /// `A x <= b`, one half-space per row of `A`.
    Polytope { normals: DMatrix<T>, offsets: DVector<T> },
    Ball { center: DVector<T>, radius: T },
}

impl<T: Real> FieldOfView<T> {
    pub fn new_box(lo: DVector<T>, hi: DVector<T>) -> Result<Self> {
        let fov = Self::Box { lo, hi };
        fov.validate()?;
        Ok(fov)
    }

    pub fn new_polytope(normals: DMatrix<T>, offsets: DVector<T>) -> Result<Self> {
        let fov = Self::Polytope { normals, offsets };
        fov.validate()?;
        Ok(fov)
    }

    pub fn new_ball(center: DVector<T>, radius: T) -> Result<Self> {
        let fov = Self::Ball { center, radius };
        fov.validate()?;
        Ok(fov)
    }

    /// Half-space `{x : x_axis <= bound}` in `dim` dimensions, as a box.
    pub fn half_space_below(dim: usize, axis: usize, bound: T) -> Result<Self> {
        let lo = DVector::from_element(dim, -T::infinity());
        let mut hi = DVector::from_element(dim, T::infinity());
        if axis >= dim {
            return Err(Error::InvalidArgument(format!("axis {axis} out of range")));
        }
        hi[axis] = bound;
        Self::new_box(lo, hi)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Box { lo, hi } => {
                if lo.len() != hi.len() || lo.is_empty() {
                    return Err(Error::DimensionMismatch {
                        expected: lo.len(),
                        got: hi.len(),
                    });
                }
                if lo.iter().zip(hi.iter()).any(|(l, h)| !(l < h)) {
                    return Err(Error::InvalidArgument("box requires lo < hi componentwise".into()));
                }
            }
            Self::Polytope { normals, offsets } => {
                if normals.nrows() != offsets.len() || normals.ncols() == 0 || normals.nrows() == 0 {
                    return Err(Error::DimensionMismatch {
                        expected: normals.nrows(),
                        got: offsets.len(),
                    });
                }
                if normals.iter().chain(offsets.iter()).any(|v| !v.is_finite()) {
                    return Err(Error::InvalidArgument("polytope entries must be finite".into()));
                }
            }
            Self::Ball { center, radius } => {
                if center.is_empty() {
                    return Err(Error::InvalidArgument("ball center is empty".into()));
                }
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return Err(Error::InvalidArgument("ball radius must be positive".into()));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Box { lo, .. } => lo.len(),
            Self::Polytope { normals, .. } => normals.ncols(),
            Self::Ball { center, .. } => center.len(),
        }
    }

    pub fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: dim,
            });
        }
        Ok(())
    }

    pub fn contains(&self, x_p: &DVector<T>) -> Result<bool> {
        self.check_dim(x_p.len())?;
        Ok(self.contains_unchecked(x_p.iter().copied()))
    }

    /// Membership without the dimension check.
    pub(crate) fn contains_unchecked(&self, mut x: impl ExactSizeIterator<Item = T> + Clone) -> bool {
        match self {
            Self::Box { lo, hi } => x
                .zip(lo.iter().zip(hi.iter()))
                .all(|(v, (l, h))| *l <= v && v <= *h),
            Self::Polytope { normals, offsets } => (0..normals.nrows()).all(|r| {
                let lhs = x
                    .clone()
                    .enumerate()
                    .fold(T::zero(), |acc, (c, v)| acc + normals[(r, c)] * v);
                lhs <= offsets[r]
            }),
            Self::Ball { center, radius } => {
                let d2 = (&mut x)
                    .zip(center.iter())
                    .fold(T::zero(), |acc, (v, c)| acc + (v - *c) * (v - *c));
                d2 <= *radius * *radius
            }
        }
    }

    /// Membership of `h^{-1}(z) = V Λ^{1/2} z + m_p`, i.e. of `z` in the
    /// whitened image of the FoV.
    pub fn contains_transformed(
        &self,
        z: &DVector<T>,
        basis: &EigenBasis<T>,
        mean_p: &DVector<T>,
    ) -> Result<bool> {
        self.check_dim(z.len())?;
        self.check_dim(basis.dim())?;
        self.check_dim(mean_p.len())?;
        let x = basis.sqrt_scaling() * z + mean_p;
        Ok(self.contains_unchecked(x.iter().copied()))
    }

    /// The same shape moved by `offset`.
    pub fn translated(&self, offset: &DVector<T>) -> Result<Self> {
        self.check_dim(offset.len())?;
        Ok(match self {
            Self::Box { lo, hi } => Self::Box {
                lo: lo + offset,
                hi: hi + offset,
            },
            Self::Polytope { normals, offsets } => Self::Polytope {
                normals: normals.clone(),
                offsets: offsets + normals * offset,
            },
            Self::Ball { center, radius } => Self::Ball {
                center: center + offset,
                radius: *radius,
            },
        })
    }
}

/// Whitened-space maps for one component.
pub fn whiten<T: Real>(x_p: &DVector<T>, basis: &EigenBasis<T>, mean_p: &DVector<T>) -> DVector<T> {
    let inv_roots = basis.values.map(|v| T::one() / v.sqrt());
    DMatrix::from_diagonal(&inv_roots) * basis.vectors.transpose() * (x_p - mean_p)
}

pub fn unwhiten<T: Real>(z: &DVector<T>, basis: &EigenBasis<T>, mean_p: &DVector<T>) -> DVector<T> {
    basis.sqrt_scaling() * z + mean_p
}

/// Uniform grid on `[-ζ, ζ]^dim` with `N` points per axis, in whitened units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CollocationGrid<T: Real> {
    zeta: T,
    points_per_dim: usize,
    dim: usize,
}

impl<T: Real> CollocationGrid<T> {
    pub const DEFAULT_ZETA: f64 = 3.0;
    pub const DEFAULT_POINTS: usize = 7;

    pub fn new(zeta: T, points_per_dim: usize, dim: usize) -> Result<Self> {
        if !(zeta > T::zero()) || !zeta.is_finite() {
            return Err(Error::InvalidArgument("grid half-width must be positive".into()));
        }
        if points_per_dim < 2 || dim == 0 {
            return Err(Error::InvalidArgument(
                "grid needs at least 2 points per axis and dim >= 1".into(),
            ));
        }
        if points_per_dim.checked_pow(dim as u32).is_none_or(|n| n > 1 << 24) {
            return Err(Error::InvalidArgument("collocation grid too large".into()));
        }
        Ok(Self {
            zeta,
            points_per_dim,
            dim,
        })
    }

    pub fn with_defaults(dim: usize) -> Result<Self> {
        Self::new(T::lit(Self::DEFAULT_ZETA), Self::DEFAULT_POINTS, dim)
    }

    pub fn zeta(&self) -> T {
        self.zeta
    }

    pub fn points_per_dim(&self) -> usize {
        self.points_per_dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn with_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.zeta, self.points_per_dim, dim)
    }

    pub fn len(&self) -> usize {
        self.points_per_dim.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of (zero-based) index `i` along any axis:
    /// `-ζ + 2ζ i/(N-1)`.
    pub fn coordinate(&self, i: usize) -> T {
        let frac = T::lit(i as f64) / T::lit((self.points_per_dim - 1) as f64);
        -self.zeta + (self.zeta + self.zeta) * frac
    }

    /// Multi-index of flat index `flat`; axis 0 varies fastest.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = Vec::with_capacity(self.dim);
        for _ in 0..self.dim {
            idx.push(flat % self.points_per_dim);
            flat /= self.points_per_dim;
        }
        idx
    }

    pub fn point(&self, flat: usize) -> DVector<T> {
        DVector::from_iterator(
            self.dim,
            self.multi_index(flat).into_iter().map(|i| self.coordinate(i)),
        )
    }
}

/// Inclusion flags over a collocation grid plus the derived consistency data.
#[derive(Debug, Clone, PartialEq)]
pub struct GridClassification {
    /// Flag per grid point in flat order (axis 0 fastest).
    pub flags: Vec<bool>,
    pub points_per_dim: usize,
    /// True iff every flag equals the first.
    pub all_same: bool,
    /// Per axis `j`: number of constant-`z_j` planes that are uniformly
    /// inside or uniformly outside.
    pub plane_counts: Vec<usize>,
}

impl GridClassification {
    pub fn from_flags(flags: Vec<bool>, points_per_dim: usize, dim: usize) -> Self {
        let all_same = flags.iter().all(|&f| f == flags[0]);
        let mut plane_counts = vec![0; dim];
        let n = points_per_dim;
        for (j, count) in plane_counts.iter_mut().enumerate() {
            let stride = n.pow(j as u32);
            // The plane's reference point has every other index at zero.
            for i in 0..n {
                let reference = flags[i * stride];
                let uniform = flags
                    .iter()
                    .enumerate()
                    .filter(|(flat, _)| (flat / stride) % n == i)
                    .all(|(_, &f)| f == reference);
                if uniform {
                    *count += 1;
                }
            }
        }
        Self {
            flags,
            points_per_dim,
            all_same,
            plane_counts,
        }
    }
}

/// Tests every grid point of `grid` in the whitened frame of a component with
/// position mean `mean_p` and position-marginal basis `basis`.
pub fn classify_grid<T: Real>(
    fov: &FieldOfView<T>,
    grid: &CollocationGrid<T>,
    basis: &EigenBasis<T>,
    mean_p: &DVector<T>,
) -> Result<GridClassification> {
    fov.check_dim(grid.dim())?;
    fov.check_dim(basis.dim())?;
    fov.check_dim(mean_p.len())?;
    let scaling = basis.sqrt_scaling();
    let flags = (0..grid.len())
        .map(|flat| {
            let x = &scaling * grid.point(flat) + mean_p;
            fov.contains_unchecked(x.iter().copied())
        })
        .collect();
    Ok(GridClassification::from_flags(flags, grid.points_per_dim(), grid.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmix::eigendecompose;
    use nalgebra::{dmatrix, dvector};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_box() -> FieldOfView<f64> {
        FieldOfView::new_box(dvector![-1.0, -1.0], dvector![1.0, 1.0]).unwrap()
    }

    fn triangle() -> FieldOfView<f64> {
        FieldOfView::new_polytope(
            dmatrix![1.0, 1.0; -1.0, 0.0; 0.0, -1.0],
            dvector![1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn contains_examples() {
        let b = unit_box();
        assert!(b.contains(&dvector![0.0, 0.0]).unwrap());
        assert!(b.contains(&dvector![1.0, 1.0]).unwrap());
        assert!(!b.contains(&dvector![1.0, 1.0 + 1e-15]).unwrap());
        assert!(!triangle().contains(&dvector![0.6, 0.5]).unwrap());
        assert!(triangle().contains(&dvector![0.5, 0.5]).unwrap());
        let ball = FieldOfView::new_ball(dvector![1.0, 0.0], 2.0).unwrap();
        assert!(ball.contains(&dvector![3.0, 0.0]).unwrap());
        assert!(!ball.contains(&dvector![3.0, 0.1]).unwrap());
        assert!(matches!(
            b.contains(&dvector![0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn constructors_validate() {
        assert!(FieldOfView::new_box(dvector![0.0, 1.0], dvector![1.0, 1.0]).is_err());
        assert!(FieldOfView::new_ball(dvector![0.0], 0.0).is_err());
        assert!(FieldOfView::new_polytope(dmatrix![1.0, 0.0], dvector![1.0, 2.0]).is_err());
        let half = FieldOfView::<f64>::half_space_below(1, 0, 0.0).unwrap();
        assert!(half.contains(&dvector![-1e300]).unwrap());
        assert!(half.contains(&dvector![0.0]).unwrap());
        assert!(!half.contains(&dvector![1e-300]).unwrap());
    }

    #[test]
    fn contains_transformed_examples() {
        let id = eigendecompose(&DMatrix::<f64>::identity(2, 2)).unwrap();
        let zero = dvector![0.0, 0.0];
        let z = dvector![0.3, -1.0];
        assert_eq!(
            unit_box().contains_transformed(&z, &id, &zero).unwrap(),
            unit_box().contains(&z).unwrap()
        );

        let basis = eigendecompose(&dmatrix![4.0, 0.0; 0.0, 1.0]).unwrap();
        let fov = FieldOfView::new_box(dvector![-3.0, -1.0], dvector![3.0, 1.0]).unwrap();
        assert!(fov.contains_transformed(&dvector![1.0, 0.0], &basis, &zero).unwrap());
        assert!(!fov.contains_transformed(&dvector![2.0, 0.0], &basis, &zero).unwrap());
    }

    #[test]
    fn grid_coordinates() {
        let g = CollocationGrid::<f64>::new(3.0, 7, 2).unwrap();
        assert_eq!(g.coordinate(0), -3.0);
        assert_eq!(g.coordinate(6), 3.0);
        assert_eq!(g.coordinate(3), 0.0);
        assert_eq!(g.len(), 49);
        let odd = CollocationGrid::<f64>::new(0.7, 5, 3).unwrap();
        assert_eq!(odd.coordinate(0), -0.7);
        assert_eq!(odd.coordinate(4), 0.7);
        assert_eq!(odd.point(1 + 5 * 2 + 25 * 4), dvector![odd.coordinate(1), 0.0, 0.7]);
        assert!(CollocationGrid::<f64>::new(3.0, 1, 2).is_err());
    }

    #[test]
    fn classify_examples() {
        let id = eigendecompose(&DMatrix::<f64>::identity(2, 2)).unwrap();
        let zero = dvector![0.0, 0.0];
        let grid = CollocationGrid::new(3.0, 7, 2).unwrap();

        let big = FieldOfView::new_box(dvector![-10.0, -10.0], dvector![10.0, 10.0]).unwrap();
        let c = classify_grid(&big, &grid, &id, &zero).unwrap();
        assert!(c.all_same && c.flags.iter().all(|&f| f));
        assert_eq!(c.plane_counts, vec![7, 7]);

        let far = FieldOfView::new_box(dvector![20.0, 20.0], dvector![21.0, 21.0]).unwrap();
        let c = classify_grid(&far, &grid, &id, &zero).unwrap();
        assert!(c.all_same && c.flags.iter().all(|&f| !f));

        let half = FieldOfView::half_space_below(2, 0, 0.0).unwrap();
        let c = classify_grid(&half, &grid, &id, &zero).unwrap();
        assert!(!c.all_same);
        assert_eq!(c.plane_counts, vec![7, 0]);
        // Enumerate the 49 points directly.
        for flat in 0..49 {
            let z = grid.point(flat);
            assert_eq!(c.flags[flat], z[0] <= 0.0);
        }
    }

    fn random_spd(rng: &mut ChaCha8Rng, dim: usize) -> DMatrix<f64> {
        let a = DMatrix::from_fn(dim, dim, |_, _| rng.random::<f64>() * 2.0 - 1.0);
        &a * a.transpose() + DMatrix::identity(dim, dim) * 0.05
    }

    proptest! {
        #[test]
        fn complement_is_negation(x in -2.0f64..2.0, y in -2.0f64..2.0) {
            let p = dvector![x, y];
            for fov in [unit_box(), triangle()] {
                let inside = fov.contains(&p).unwrap();
                prop_assert!(inside ^ !inside);
            }
        }

        #[test]
        fn whitening_is_consistent(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let dim = 1 + (seed % 3) as usize;
            let p = random_spd(&mut rng, dim);
            let basis = eigendecompose(&p).unwrap();
            let m = DVector::from_fn(dim, |_, _| rng.random::<f64>() - 0.5);
            let x = DVector::from_fn(dim, |_, _| rng.random::<f64>() * 4.0 - 2.0);
            let z = whiten(&x, &basis, &m);
            let back = unwhiten(&z, &basis, &m);
            prop_assert!((&back - &x).amax() <= 1e-9);

            let fov = FieldOfView::new_box(DVector::from_element(dim, -0.5), DVector::from_element(dim, 0.7)).unwrap();
            prop_assert_eq!(
                fov.contains_transformed(&z, &basis, &m).unwrap(),
                fov.contains(&back).unwrap()
            );

            let maha = crate::gmix::mahalanobis_squared(&x, &m, &p).unwrap().sqrt();
            prop_assert!((z.norm() - maha).abs() <= 1e-9 * (1.0 + maha));
        }
    }
}
