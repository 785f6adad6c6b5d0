//! Planar geometry: polygons, convex hulls, Hausdorff distance, corner
//! frames and the contour construction used by the corner integral
//! identities.
//!
//! All values are immutable after construction and all operations are pure.

mod contours;
mod frame;
mod polygon;

pub use contours::{build_contours, AreaQuad, ContourParams, ContourSet, CurveQuad};
pub use frame::{CornerFrame, EdgeRay};
pub use polygon::{
    convex_hull, directed_hausdorff, directed_hausdorff_realizer, hausdorff_distance,
    point_segment_distance, validate_admissible, AdmissibilityParams, Polygon,
};

/// 2D point / vector.
pub type Vec2 = nalgebra::Vector2<f64>;

/// Absolute tolerance for geometric predicates, in model units.
pub const GEOM_TOL: f64 = 1e-9;

/// Counterclockwise quarter turn.
pub fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// z-component of the cross product.
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}
