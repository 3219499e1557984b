//! mmslab: a laboratory for metric measure spaces.
//!
//! Model geodesic spaces (normed planes, the hyperbolic plane, glued-interval
//! trees, convex subsets, weighted and rescaled variants) expose exact
//! distance, geodesic and measure oracles. On top of them sit statistical
//! and exact audits of synthetic curvature conditions: convexity and
//! concavity of the metric under geodesic contraction, measure-contraction
//! inequalities and their comparison profiles, and empirical tangent-cone
//! constructions with Gromov-Hausdorff bounds.
//!
//! All randomness is counter-based and replayable: an audit is a pure
//! function of its inputs and a `(seed, stream)` pair.

pub mod audit;
pub mod convexity;
pub mod error;
pub mod mcp;
pub mod numeric;
pub mod point;
pub mod rng;
pub mod scalar;
pub mod space;
pub mod spaces;
pub mod tangent;

pub use error::{Error, Result};
pub use point::{Family, Point, TreeAddress};
pub use rng::RandomStream;
pub use scalar::Scalar;
pub use space::{MassEstimate, MassMethod, MeasureKind, Region, Space, SpaceInfo, WeightSpec};

/// Default scalar type. The shipped tolerances assume this precision.
pub type Real = f64;

/// Concrete aliases for the common case.
pub type RealSpace = Space<Real>;
pub type RealPoint = Point<Real>;
