//! Bounded field-of-view finite set statistics.
//!
//! The crate partitions Gaussian-mixture densities along the boundary of a
//! sensor field of view (FoV) by recursive optimal splitting, applies Bayes
//! updates for presence, absence and non-detection, and computes the
//! distribution of the number of objects inside a FoV for Poisson, IIDC,
//! multi-Bernoulli and GLMB multi-object densities. A grid-search planner
//! places a FoV where that count is most uncertain.
//!
//! All numerical code is generic over [`Real`] (`f32` or `f64`). The aliases
//! at the crate root fix the scalar to `f64`, which is what the tolerances in
//! the documentation and tests refer to.

pub mod cardinality;
pub mod error;
pub mod fov;
pub mod gmix;
pub mod models;
pub mod partition;
pub mod planner;
pub mod rng;
pub mod scalar;
pub mod splitlib;

pub use error::{Error, Result};
pub use scalar::Real;

pub type GaussianComponent = gmix::GaussianComponent<f64>;
pub type GaussianMixture = gmix::GaussianMixture<f64>;
pub type EigenBasis = gmix::EigenBasis<f64>;
pub type FieldOfView = fov::FieldOfView<f64>;
pub type CollocationGrid = fov::CollocationGrid<f64>;
pub type SplitConfig = partition::SplitConfig<f64>;
pub type PartitionResult = partition::PartitionResult<f64>;
pub type PoissonRfs = models::PoissonRfs<f64>;
pub type IidcRfs = models::IidcRfs<f64>;
pub type MultiBernoulli = models::MultiBernoulli<f64>;
pub type GlmbDistribution = models::GlmbDistribution<f64>;
pub type RfsModel = models::RfsModel<f64>;
pub type FovMassMethod = models::FovMassMethod<f64>;
pub type CardinalityPmf = cardinality::CardinalityPmf<f64>;
pub type PlacementQuery = planner::PlacementQuery<f64>;
pub type PlacementResult = planner::PlacementResult<f64>;

pub use splitlib::{SplitLibrary, SplitParameters};
