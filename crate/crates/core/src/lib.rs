//! Combinatorial tiling workbench.
//!
//! Wang tile solvers, a Turing machine to tile set compiler, Robinson's
//! aperiodic tiles, substitution tilings, decorated polyform searches and
//! exact imbalance bookkeeping for planar maps.
//!
//! Geometry is generic over [`Scalar`]; [`Rational`] gives exact
//! arithmetic wherever coordinates allow it.

pub mod angle;
pub mod balance;
pub mod geometry;
pub mod machine;
pub mod polyform;
pub mod robinson;
pub mod scalar;
pub mod search;
pub mod substitution;
pub mod wang;

pub use angle::PiAngle;
pub use scalar::Scalar;
pub use search::SearchConfig;

pub type Rational = num_rational::Ratio<i64>;
pub type Point64 = geometry::Point<f64>;
pub type PointQ = geometry::Point<Rational>;
pub type Patch64 = geometry::PolygonPatch<f64>;
pub type PatchQ = geometry::PolygonPatch<Rational>;

/// Default node budget for exhaustive searches.
pub const DEFAULT_BUDGET: u64 = 10_000_000;
