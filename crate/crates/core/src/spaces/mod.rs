//! Constructors for the concrete model spaces.

pub mod hyperbolic;
pub mod normed;
pub mod tree;

use crate::error::Result;
use crate::point::Point;
use crate::scalar::Scalar;
use crate::space::{Geometry, Region, Space, WeightSpec};

pub use normed::{hexagon_vertices, NormKind, NormSpec};
pub use tree::GluedIntervalSpec;

/// Default sampler caps, in base units.
const NORMED_CAP: f64 = 64.0;
const HYPERBOLIC_CAP: f64 = 12.0;
const TREE_CAP: f64 = 8.0;

/// Normed space from a validated spec: distance is the norm of the
/// difference, geodesics are affine, the measure is Lebesgue.
pub fn make_normed<S: Scalar>(spec: NormSpec<S>) -> Space<S> {
    Space::from_geometry(Geometry::Normed(spec), S::of(NORMED_CAP))
}

/// Shorthand for the plane with a p-norm.
pub fn lp_space<S: Scalar>(dim: usize, p: S) -> Result<Space<S>> {
    Ok(make_normed(NormSpec::lp(dim, p)?))
}

/// The stock symmetric hexagon norm on the plane.
pub fn hexagon_space<S: Scalar>() -> Result<Space<S>> {
    Ok(make_normed(NormSpec::new(2, NormKind::Polygon(hexagon_vertices()))?))
}

/// The hyperbolic plane of curvature -1 with its area measure.
pub fn make_hyperbolic<S: Scalar>() -> Space<S> {
    Space::from_geometry(Geometry::Hyperbolic, S::of(HYPERBOLIC_CAP))
}

pub fn hyperbolic_space<S: Scalar>() -> Space<S> {
    make_hyperbolic()
}

/// Glued-interval tree with the length measure.
pub fn make_glued_intervals<S: Scalar>(spec: GluedIntervalSpec<S>) -> Space<S> {
    Space::from_geometry(Geometry::Tree(tree::TreeGeometry::new(spec)), S::of(TREE_CAP))
}

/// The stock glued tree: `eps_i = 10^(-i^2)`, `delta_i = 10^(-i^2-i)`, depth 4.
pub fn glued_tree_space<S: Scalar>() -> Result<Space<S>> {
    Ok(make_glued_intervals(GluedIntervalSpec::power_example(4)?))
}

/// Restriction of `base` to a convex region. Geodesics and measure are
/// inherited; points outside the region become invalid.
pub fn make_convex_subset<S: Scalar>(base: &Space<S>, region: Region<S>) -> Result<Space<S>> {
    base.clone().with_region(region)
}

/// Closed-ball restriction (convex in every family here).
pub fn convex_ball_subset<S: Scalar>(base: &Space<S>, center: Point<S>, radius: S) -> Result<Space<S>> {
    make_convex_subset(base, Region::Ball { center, radius })
}

/// The closed Euclidean half-plane `x >= 0`.
pub fn euclidean_halfplane<S: Scalar>() -> Result<Space<S>> {
    let base = lp_space(2, S::two())?;
    make_convex_subset(&base, Region::HalfSpace { normal: vec![S::one(), S::zero()], offset: S::zero() })
}

/// Same metric, measure multiplied by the density `e^{-V}`.
pub fn make_weighted<S: Scalar>(base: &Space<S>, weight: WeightSpec<S>) -> Result<Space<S>> {
    base.clone().with_weight(weight)
}

/// Hyperbolic plane with the Gaussian-type measure `e^{-r^2} dvol`.
pub fn weighted_hyperbolic<S: Scalar>() -> Result<Space<S>> {
    make_weighted(&make_hyperbolic(), WeightSpec::gaussian())
}

/// Rescaled space: distances multiplied by `lambda`, measure by `lambda^n`.
/// An optional `center` marks the new base point of the pointed space.
pub fn rescale<S: Scalar>(base: &Space<S>, lambda: S, center: Option<Point<S>>) -> Result<Space<S>> {
    base.clone().rescaled(lambda, center)
}
