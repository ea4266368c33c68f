//! Planar primitives: points, transforms, polygons, patch checking,
//! the Livio pentagon and SVG output.

mod livio;
mod point;
mod polygon;
mod svg;
mod transform;
mod validate;

pub use livio::{angles_from, livio_sums, satisfies_livio, solve_livio_pentagon, trace_unit_edges, LivioPentagon};
pub use point::{orient, Point};
pub use polygon::{PatchJson, Polygon, PolygonPatch, Tile, TileJson};
pub use svg::{render_svg, render_svg_with_overlay, SvgStyle, DEFAULT_FILL};
pub use transform::{Affine, Isometry};
pub use validate::{validate_patch, validate_patch_in_region, PatchVerdict};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("tolerance {0} out of range")]
    BadTolerance(f64),
    #[error("patch has no tiles")]
    EmptyPatch,
    #[error("degenerate polygon at index {index}: {reason}")]
    Degenerate { index: usize, reason: String },
    #[error("root finder did not converge (residual {residual:e})")]
    Numeric { residual: f64 },
    #[error("{0} distinct solutions where one was expected")]
    Ambiguous(usize),
}
